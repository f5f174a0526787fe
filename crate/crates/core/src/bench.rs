//! Exact-cover and weighted-coverage instances, their constraint systems,
//! a brute-force reference solver and an end-to-end experiment driver.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::constraints::{
    normalize_linear, parity_set, preprocess_cardinality, preprocess_mixed, preprocess_parity,
    BlockKind, CardinalityConstraint, DisjointSet, LinearConstraint, ReducedSet, Selection,
    Strategy,
};
use crate::error::{Error, Result};
use crate::grover::{run_with, Mode, OraclePredicate};
use crate::noise::{run_noisy, NoiseModel, NoisyProgram, ShotPlan};
use crate::prep::{build_initializer, Initializer};

pub const MAX_BRUTE_FORCE_VARIABLES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverInstance {
    universe: Vec<String>,
    /// Subset `i` as indices into the universe.
    subsets: Vec<BTreeSet<usize>>,
    weights: Vec<u32>,
    target: u32,
}

impl CoverInstance {
    /// Elements not covered by any subset are allowed here; they make the
    /// instance infeasible rather than malformed.
    pub fn new(
        universe: Vec<String>,
        subsets: Vec<BTreeSet<usize>>,
        weights: Option<Vec<u32>>,
        target: u32,
    ) -> Result<Self> {
        let distinct: BTreeSet<&String> = universe.iter().collect();
        if distinct.len() != universe.len() {
            return Err(Error::Domain("duplicate universe element".into()));
        }
        if subsets.is_empty() {
            return Err(Error::Domain("no subsets".into()));
        }
        for (i, s) in subsets.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Domain(format!("subset {} is empty", i + 1)));
            }
            if let Some(&e) = s.iter().find(|&&e| e >= universe.len()) {
                return Err(Error::Domain(format!(
                    "subset {} names element {e} outside the universe",
                    i + 1
                )));
            }
        }
        let weights = weights.unwrap_or_else(|| vec![1; subsets.len()]);
        if weights.len() != subsets.len() {
            return Err(Error::Domain(format!(
                "{} weights for {} subsets",
                weights.len(),
                subsets.len()
            )));
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(Error::Domain(format!("subset {} has weight 0", i + 1)));
        }
        if target == 0 {
            return Err(Error::Domain("coverage target must be positive".into()));
        }
        Ok(CoverInstance {
            universe,
            subsets,
            weights,
            target,
        })
    }

    /// Builds from named elements, e.g. `&[&["u1", "u5"], ...]`.
    pub fn from_names(
        universe: &[&str],
        subsets: &[&[&str]],
        weights: Option<Vec<u32>>,
        target: u32,
    ) -> Result<Self> {
        let index: BTreeMap<&str, usize> =
            universe.iter().enumerate().map(|(i, &u)| (u, i)).collect();
        let subsets = subsets
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.iter()
                    .map(|e| {
                        index.get(e).copied().ok_or_else(|| {
                            Error::Domain(format!("subset {} names unknown element {e}", i + 1))
                        })
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?;
        CoverInstance::new(
            universe.iter().map(|u| u.to_string()).collect(),
            subsets,
            weights,
            target,
        )
    }

    /// The ten-subset, seven-element exact-cover instance with the unique
    /// solution {A3, A5, A9}.
    pub fn sample_exact_cover() -> Self {
        CoverInstance::from_names(&SAMPLE_UNIVERSE, &SAMPLE_SUBSETS, None, 1)
            .expect("valid instance")
    }

    /// Same subsets with weight 2 on A3, A6, A10 and every element covered
    /// exactly twice.
    pub fn sample_weighted_cover() -> Self {
        let mut w = vec![1; 10];
        for i in [3, 6, 10] {
            w[i - 1] = 2;
        }
        CoverInstance::from_names(&SAMPLE_UNIVERSE, &SAMPLE_SUBSETS, Some(w), 2)
            .expect("valid instance")
    }

    pub fn num_variables(&self) -> usize {
        self.subsets.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn subsets(&self) -> &[BTreeSet<usize>] {
        &self.subsets
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.iter().any(|&w| w != 1)
    }

    /// Subsets containing element `j`.
    pub fn covering(&self, j: usize) -> BTreeSet<usize> {
        (0..self.subsets.len())
            .filter(|&i| self.subsets[i].contains(&j))
            .collect()
    }

    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.universe.len())
            .filter(|&j| self.covering(j).is_empty())
            .collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut universe: Option<Vec<String>> = None;
        let mut subsets: BTreeMap<usize, (usize, Vec<String>, u32)> = BTreeMap::new();
        let mut target = None;
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| err(line_no, format!("expected `key: value`, got `{line}`")))?;
            let mut head_words = head.split_whitespace();
            match (head_words.next(), head_words.next(), head_words.next()) {
                (Some("universe"), None, _) => {
                    if universe.is_some() {
                        return Err(err(line_no, "universe given twice".into()));
                    }
                    let elems: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if elems.is_empty() {
                        return Err(err(line_no, "empty universe".into()));
                    }
                    universe = Some(elems);
                }
                (Some("target"), None, _) => {
                    if target.is_some() {
                        return Err(err(line_no, "target given twice".into()));
                    }
                    let t: u32 = rest
                        .trim()
                        .parse()
                        .map_err(|_| err(line_no, format!("bad target `{}`", rest.trim())))?;
                    target = Some(t);
                }
                (Some("subset"), Some(idx), None) => {
                    let i: usize = idx
                        .parse()
                        .map_err(|_| err(line_no, format!("bad subset index `{idx}`")))?;
                    let mut words: Vec<&str> = rest.split_whitespace().collect();
                    let mut weight = 1;
                    if words.len() >= 2 && words[words.len() - 2] == "weight" {
                        let w = words[words.len() - 1];
                        weight = w
                            .parse()
                            .map_err(|_| err(line_no, format!("bad weight `{w}`")))?;
                        words.truncate(words.len() - 2);
                    }
                    if words.is_empty() {
                        return Err(err(line_no, format!("subset {i} is empty")));
                    }
                    if subsets
                        .insert(
                            i,
                            (
                                line_no,
                                words.iter().map(|w| w.to_string()).collect(),
                                weight,
                            ),
                        )
                        .is_some()
                    {
                        return Err(err(line_no, format!("subset {i} given twice")));
                    }
                }
                _ => return Err(err(line_no, format!("unknown key `{}`", head.trim()))),
            }
        }
        let universe = universe.ok_or_else(|| err(1, "missing `universe:` line".into()))?;
        let index: BTreeMap<&str, usize> = universe
            .iter()
            .enumerate()
            .map(|(i, u)| (u.as_str(), i))
            .collect();
        if index.len() != universe.len() {
            return Err(err(1, "duplicate universe element".into()));
        }
        let mut sets = Vec::new();
        let mut weights = Vec::new();
        for (expected, (i, (line_no, elems, w))) in (1..).zip(&subsets) {
            if *i != expected {
                return Err(err(
                    *line_no,
                    format!("subset indices must run 1..n; expected {expected}, got {i}"),
                ));
            }
            let set = elems
                .iter()
                .map(|e| {
                    index
                        .get(e.as_str())
                        .copied()
                        .ok_or_else(|| err(*line_no, format!("unknown element `{e}`")))
                })
                .collect::<Result<BTreeSet<usize>>>()?;
            if *w == 0 {
                return Err(err(*line_no, "weight must be positive".into()));
            }
            sets.push(set);
            weights.push(*w);
        }
        if sets.is_empty() {
            return Err(err(text.lines().count().max(1), "no subsets".into()));
        }
        let target = target.unwrap_or(1);
        if target == 0 {
            return Err(err(1, "target must be positive".into()));
        }
        CoverInstance::new(universe, sets, Some(weights), target)
    }
}

impl FromStr for CoverInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoverInstance::parse(s)
    }
}

impl fmt::Display for CoverInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "universe: {}", self.universe.join(" "))?;
        for (i, s) in self.subsets.iter().enumerate() {
            write!(f, "subset {}:", i + 1)?;
            for &e in s {
                write!(f, " {}", self.universe[e])?;
            }
            if self.weights[i] != 1 {
                write!(f, " weight {}", self.weights[i])?;
            }
            writeln!(f)?;
        }
        if self.target != 1 {
            writeln!(f, "target: {}", self.target)?;
        }
        Ok(())
    }
}

const SAMPLE_UNIVERSE: [&str; 7] = ["u1", "u2", "u3", "u4", "u5", "u6", "u7"];

const SAMPLE_SUBSETS: [&[&str]; 10] = [
    &["u1", "u5"],
    &["u1", "u3", "u6"],
    &["u1", "u2", "u5"],
    &["u1", "u7"],
    &["u3", "u4"],
    &["u4", "u6"],
    &["u2", "u4", "u5"],
    &["u2", "u7"],
    &["u6", "u7"],
    &["u3", "u5", "u7"],
];

/// One constraint per element: the weights of the subsets covering it sum
/// to the target.
pub fn constraints_of(instance: &CoverInstance) -> Result<Vec<LinearConstraint>> {
    if let Some(&j) = instance.uncovered().first() {
        return Err(Error::Infeasible(format!(
            "element {} is covered by no subset",
            instance.universe[j]
        )));
    }
    (0..instance.universe.len())
        .map(|j| {
            let coefficients = instance
                .covering(j)
                .into_iter()
                .map(|i| (i, i64::from(instance.weights[i])));
            LinearConstraint::new(coefficients, i64::from(instance.target))
        })
        .collect()
}

/// The cardinality forms, when every constraint has unit coefficients.
pub fn cardinality_constraints(
    constraints: &[LinearConstraint],
) -> Option<Vec<CardinalityConstraint>> {
    constraints
        .iter()
        .map(LinearConstraint::as_cardinality)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    n: usize,
    bitstrings: BTreeSet<usize>,
}

impl SolutionSet {
    pub fn num_variables(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.bitstrings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bitstrings.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.bitstrings.contains(&x)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bitstrings.iter().copied()
    }

    pub fn count(&self) -> BigUint {
        BigUint::from(self.bitstrings.len())
    }

    /// Selected subsets of each solution, 1-based.
    pub fn selections(&self) -> Vec<Vec<usize>> {
        self.iter()
            .map(|x| {
                (0..self.n)
                    .filter(|i| x >> i & 1 == 1)
                    .map(|i| i + 1)
                    .collect()
            })
            .collect()
    }

    pub fn predicate(&self) -> OraclePredicate {
        OraclePredicate::from_solutions(self.n, self.bitstrings.iter().copied())
    }
}

/// Exhaustive enumeration of all `2^n` assignments. Bit `i` of an
/// assignment selects subset `i + 1`.
pub fn brute_force(instance: &CoverInstance) -> Result<SolutionSet> {
    let n = instance.num_variables();
    if n > MAX_BRUTE_FORCE_VARIABLES {
        return Err(Error::Capacity(format!(
            "{n} variables exceed the brute-force limit {MAX_BRUTE_FORCE_VARIABLES}"
        )));
    }
    if !instance.uncovered().is_empty() {
        return Ok(SolutionSet {
            n,
            bitstrings: BTreeSet::new(),
        });
    }
    let constraints = constraints_of(instance)?;
    let bitstrings = (0..1usize << n)
        .into_par_iter()
        .filter(|&x| constraints.iter().all(|c| c.is_satisfied(x as u64)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    Ok(SolutionSet { n, bitstrings })
}

/// One entry of an explicit set list; indices are 1-based constraint
/// numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetRef {
    /// Dicke block on a cardinality constraint.
    Cardinality(usize),
    /// Relaxed block on the part of a cardinality constraint not covered by
    /// earlier entries.
    Reduced(usize),
    /// GHZ block on the parity set of a constraint.
    Parity(usize),
}

impl fmt::Display for SetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetRef::Cardinality(j) => write!(f, "c{j}"),
            SetRef::Reduced(j) => write!(f, "r{j}"),
            SetRef::Parity(j) => write!(f, "p{j}"),
        }
    }
}

impl FromStr for SetRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || {
            Error::Domain(format!(
                "bad set reference `{s}`; expected c<j>, r<j> or p<j>"
            ))
        };
        let (kind, num) = s.split_at(s.chars().next().ok_or_else(bad)?.len_utf8());
        let j: usize = num.parse().map_err(|_| bad())?;
        if j == 0 {
            return Err(bad());
        }
        match kind.to_ascii_lowercase().as_str() {
            "c" => Ok(SetRef::Cardinality(j)),
            "r" => Ok(SetRef::Reduced(j)),
            "p" => Ok(SetRef::Parity(j)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategySpec {
    Uniform,
    Cardinality { eta: usize },
    Parity,
    Mixed { eta: usize },
    Sets(Vec<SetRef>),
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Uniform => write!(f, "uniform"),
            StrategySpec::Cardinality { eta } => write!(f, "cardinality:{eta}"),
            StrategySpec::Parity => write!(f, "parity"),
            StrategySpec::Mixed { eta } => write!(f, "mixed:{eta}"),
            StrategySpec::Sets(refs) => {
                let names: Vec<String> = refs.iter().map(ToString::to_string).collect();
                write!(f, "sets:{}", names.join(","))
            }
        }
    }
}

/// Accepts `uniform`, `cardinality[:eta]`, `parity`, `mixed[:eta]` and
/// `sets:c1,c4,r7`.
impl FromStr for StrategySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.trim().split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s.trim(), None),
        };
        let eta = |arg: Option<&str>| -> Result<usize> {
            arg.map_or(Ok(0), |a| {
                a.parse()
                    .map_err(|_| Error::Domain(format!("bad threshold `{a}`")))
            })
        };
        match (name, arg) {
            ("uniform", None) => Ok(StrategySpec::Uniform),
            ("parity", None) => Ok(StrategySpec::Parity),
            ("cardinality", a) => Ok(StrategySpec::Cardinality { eta: eta(a)? }),
            ("mixed", a) => Ok(StrategySpec::Mixed { eta: eta(a)? }),
            ("sets", Some(list)) => {
                let refs = list
                    .split(',')
                    .map(SetRef::from_str)
                    .collect::<Result<Vec<_>>>()?;
                if refs.is_empty() {
                    return Err(Error::Domain("empty set list".into()));
                }
                Ok(StrategySpec::Sets(refs))
            }
            _ => Err(Error::Domain(format!("unknown strategy `{s}`"))),
        }
    }
}

fn explicit_selection(constraints: &[LinearConstraint], refs: &[SetRef]) -> Result<Selection> {
    let fetch = |j: usize| {
        constraints.get(j - 1).ok_or_else(|| {
            Error::Domain(format!(
                "constraint {j} does not exist ({} constraints)",
                constraints.len()
            ))
        })
    };
    let cardinality = |j: usize| {
        fetch(j)?
            .as_cardinality()
            .ok_or_else(|| Error::Domain(format!("constraint {j} is not a cardinality constraint")))
    };
    let mut used = BTreeSet::new();
    let mut selection = Selection::empty();
    for &r in refs {
        match r {
            SetRef::Cardinality(j) => {
                let c = cardinality(j)?;
                if !c.is_feasible() {
                    return Err(Error::Infeasible(format!(
                        "constraint {j}: target exceeds its size"
                    )));
                }
                if !c.members.is_disjoint(&used) {
                    return Err(Error::Contract(format!(
                        "constraint {j} overlaps earlier sets"
                    )));
                }
                used.extend(c.members.iter().copied());
                selection.disjoint_sets.push(DisjointSet {
                    members: c.members,
                    kind: BlockKind::Dicke { weight: c.target },
                    source: j - 1,
                });
            }
            SetRef::Reduced(j) => {
                let c = cardinality(j)?;
                let residue: BTreeSet<usize> = c.members.difference(&used).copied().collect();
                if residue.is_empty() {
                    return Err(Error::Contract(format!(
                        "constraint {j} has no variables left"
                    )));
                }
                let overlap = c.members.len() - residue.len();
                used.extend(residue.iter().copied());
                selection.threshold = selection.threshold.max(overlap);
                selection.reduced_sets.push(ReducedSet {
                    members: residue,
                    target: c.target,
                    overlap,
                    source: j - 1,
                });
            }
            SetRef::Parity(j) => {
                let (members, parity) = parity_set(&normalize_linear(fetch(j)?)?)?;
                if members.is_empty() {
                    return Err(Error::Contract(format!(
                        "constraint {j} has an empty parity set"
                    )));
                }
                if !members.is_disjoint(&used) {
                    return Err(Error::Contract(format!(
                        "constraint {j} overlaps earlier sets"
                    )));
                }
                used.extend(members.iter().copied());
                selection.disjoint_sets.push(DisjointSet {
                    members,
                    kind: BlockKind::Ghz { parity },
                    source: j - 1,
                });
            }
        }
    }
    Ok(selection)
}

/// Preprocessing output for `spec` on the instance's constraints.
pub fn select(instance: &CoverInstance, spec: &StrategySpec) -> Result<Selection> {
    let constraints = constraints_of(instance)?;
    let selection = match spec {
        StrategySpec::Uniform => Selection::empty(),
        StrategySpec::Cardinality { eta } => {
            let cs = cardinality_constraints(&constraints).ok_or_else(|| {
                Error::Domain(
                    "cardinality preprocessing needs unit weights; use parity or mixed".into(),
                )
            })?;
            preprocess_cardinality(&cs, *eta)?
        }
        StrategySpec::Parity => preprocess_parity(&constraints)?,
        StrategySpec::Mixed { eta } => preprocess_mixed(&constraints, *eta)?,
        StrategySpec::Sets(refs) => explicit_selection(&constraints, refs)?,
    };
    selection.validate(instance.num_variables())?;
    Ok(selection)
}

/// Strategy with `|S|` from brute force.
pub fn strategy_for(
    instance: &CoverInstance,
    spec: &StrategySpec,
    solutions: &SolutionSet,
) -> Result<Strategy> {
    let selection = select(instance, spec)?;
    let s = (!solutions.is_empty()).then(|| solutions.count());
    Strategy::new(spec.to_string(), selection, instance.num_variables(), s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KappaRange {
    /// Only the optimal query count.
    Auto,
    /// Every count in the range.
    Range(RangeInclusive<usize>),
}

impl FromStr for KappaRange {
    type Err = Error;

    /// `auto`, `k` or `a..b` (inclusive).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Domain(format!("bad query count `{s}`")))
        };
        if s == "auto" {
            return Ok(KappaRange::Auto);
        }
        if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(Error::Domain(format!("empty query range `{s}`")));
            }
            return Ok(KappaRange::Range(a..=b));
        }
        let k = num(s)?;
        Ok(KappaRange::Range(k..=k))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub strategy: String,
    pub kappa: usize,
    pub search_space: BigUint,
    pub solutions: usize,
    pub ideal_prob: f64,
    pub noisy_mean: Option<f64>,
    pub noisy_std: Option<f64>,
    pub runs: Option<usize>,
    pub shots: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Experiment {
    pub strategy: Strategy,
    pub initializer: Initializer,
    pub solutions: SolutionSet,
    pub rows: Vec<ExperimentRow>,
}

/// Full pipeline for one strategy. `mode` chooses how the ideal column is
/// computed (`Ideal` or `CircuitExact`); `CircuitNoisy` adds the noisy
/// columns on top of an exact reference.
pub fn run_experiment(
    instance: &CoverInstance,
    spec: &StrategySpec,
    kappa: &KappaRange,
    mode: &Mode,
) -> Result<Experiment> {
    let solutions = brute_force(instance)?;
    if solutions.is_empty() {
        return Err(Error::Infeasible("the instance has no solution".into()));
    }
    let strategy = strategy_for(instance, spec, &solutions)?;
    let initializer = build_initializer(&strategy.selection, strategy.n)?;
    let predicate = solutions.predicate();
    let range = match kappa {
        KappaRange::Auto => {
            let k = strategy.kappa_opt.expect("solutions are known");
            k..=k
        }
        KappaRange::Range(r) => r.clone(),
    };
    let kmax = *range.end();
    let exact_mode = match mode {
        Mode::CircuitExact => Mode::CircuitExact,
        _ => Mode::Ideal,
    };
    let exact = run_with(&strategy.label, &initializer, &predicate, kmax, exact_mode)?;
    let noisy = match mode {
        Mode::CircuitNoisy { noise, plan } => {
            let program = NoisyProgram::grover(&initializer, &predicate, kmax)?;
            Some((run_noisy(&program, plan, noise)?, *plan))
        }
        _ => None,
    };
    let rows = range
        .map(|k| ExperimentRow {
            strategy: strategy.label.clone(),
            kappa: k,
            search_space: strategy.search_space.clone(),
            solutions: solutions.len(),
            ideal_prob: exact.trace[k],
            noisy_mean: noisy.as_ref().map(|(o, _)| o.mean_fraction(k)),
            noisy_std: noisy.as_ref().map(|(o, _)| o.std_fraction(k)),
            runs: noisy.as_ref().map(|(_, p)| p.runs),
            shots: noisy.as_ref().map(|(_, p)| p.shots_per_run),
        })
        .collect();
    Ok(Experiment {
        strategy,
        initializer,
        solutions,
        rows,
    })
}

/// Convenience wrapper for the reference noise model.
pub fn noisy_mode(plan: ShotPlan) -> Mode {
    Mode::CircuitNoisy {
        noise: NoiseModel::reference(),
        plan,
    }
}

pub fn write_results_csv<W: Write>(out: W, rows: &[ExperimentRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "strategy",
        "kappa",
        "F",
        "S",
        "ideal_prob",
        "noisy_mean",
        "noisy_std",
        "runs",
        "shots",
    ])?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in rows {
        w.write_record([
            r.strategy.clone(),
            r.kappa.to_string(),
            r.search_space.to_string(),
            r.solutions.to_string(),
            r.ideal_prob.to_string(),
            opt(r.noisy_mean.map(|v| v.to_string())),
            opt(r.noisy_std.map(|v| v.to_string())),
            opt(r.runs.map(|v| v.to_string())),
            opt(r.shots.map(|v| v.to_string())),
        ])?;
    }
    w.flush()?;
    Ok(())
}
