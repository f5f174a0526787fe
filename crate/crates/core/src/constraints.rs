//! Linear constraint systems and the greedy preprocessing that turns them
//! into disjoint state-preparation blocks.
//!
//! Variables are 0-based internally; reports add one.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `sum_{i in members} x_i = target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalityConstraint {
    pub members: BTreeSet<usize>,
    pub target: usize,
}

impl CardinalityConstraint {
    pub fn new(members: impl IntoIterator<Item = usize>, target: usize) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if members.is_empty() {
            return Err(Error::Domain(
                "cardinality constraint with no members".into(),
            ));
        }
        Ok(CardinalityConstraint { members, target })
    }

    pub fn is_feasible(&self) -> bool {
        self.target <= self.members.len()
    }

    pub fn is_satisfied(&self, x: u64) -> bool {
        self.members.iter().filter(|&&i| x >> i & 1 == 1).count() == self.target
    }
}

/// `sum_{i} coefficients[i] * x_i = target` over binary `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    coefficients: BTreeMap<usize, i64>,
    target: i64,
}

impl LinearConstraint {
    pub fn new(coefficients: impl IntoIterator<Item = (usize, i64)>, target: i64) -> Result<Self> {
        let coefficients: BTreeMap<usize, i64> = coefficients.into_iter().collect();
        if coefficients.is_empty() {
            return Err(Error::Domain("linear constraint with no members".into()));
        }
        Ok(LinearConstraint {
            coefficients,
            target,
        })
    }

    pub fn coefficients(&self) -> &BTreeMap<usize, i64> {
        &self.coefficients
    }

    pub fn target(&self) -> i64 {
        self.target
    }

    pub fn members(&self) -> BTreeSet<usize> {
        self.coefficients.keys().copied().collect()
    }

    pub fn max_variable(&self) -> usize {
        *self.coefficients.keys().next_back().expect("non-empty")
    }

    /// The cardinality form, when every coefficient is one.
    pub fn as_cardinality(&self) -> Option<CardinalityConstraint> {
        let all_ones = self.coefficients.values().all(|&a| a == 1);
        (all_ones && self.target >= 0).then(|| CardinalityConstraint {
            members: self.members(),
            target: self.target as usize,
        })
    }

    pub fn is_satisfied(&self, x: u64) -> bool {
        let lhs: i64 = self
            .coefficients
            .iter()
            .filter(|(&i, _)| x >> i & 1 == 1)
            .map(|(_, &a)| a)
            .sum();
        lhs == self.target
    }
}

impl From<&CardinalityConstraint> for LinearConstraint {
    fn from(c: &CardinalityConstraint) -> Self {
        LinearConstraint {
            coefficients: c.members.iter().map(|&i| (i, 1)).collect(),
            target: c.target as i64,
        }
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (i, a)) in self.coefficients.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *a == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "{a}x{}", i + 1)?;
            }
        }
        write!(f, " = {}", self.target)
    }
}

/// Divides coefficients and target by the coefficients' gcd.
pub fn normalize_linear(c: &LinearConstraint) -> Result<LinearConstraint> {
    let g = c.coefficients.values().fold(0i64, |g, a| g.gcd(a));
    if g == 0 {
        return if c.target == 0 {
            Ok(c.clone())
        } else {
            Err(Error::Infeasible(format!("{c}: all coefficients are zero")))
        };
    }
    if c.target % g != 0 {
        return Err(Error::Infeasible(format!(
            "{c}: gcd {g} of the coefficients does not divide the target"
        )));
    }
    Ok(LinearConstraint {
        coefficients: c.coefficients.iter().map(|(&i, &a)| (i, a / g)).collect(),
        target: c.target / g,
    })
}

/// Variables with odd coefficients and the parity their sum must have.
pub fn parity_set(c: &LinearConstraint) -> Result<(BTreeSet<usize>, u8)> {
    let odd: BTreeSet<usize> = c
        .coefficients
        .iter()
        .filter(|(_, a)| a.rem_euclid(2) == 1)
        .map(|(&i, _)| i)
        .collect();
    let parity = c.target.rem_euclid(2) as u8;
    if odd.is_empty() && parity == 1 {
        return Err(Error::Infeasible(format!(
            "{c}: even left-hand side cannot equal an odd target"
        )));
    }
    Ok((odd, parity))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockKind {
    /// Fixed Hamming weight.
    Dicke { weight: usize },
    /// Fixed Hamming-weight parity.
    Ghz { parity: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointSet {
    pub members: BTreeSet<usize>,
    pub kind: BlockKind,
    /// Index of the originating constraint.
    pub source: usize,
}

/// Residue of a constraint that overlapped already-selected variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedSet {
    pub members: BTreeSet<usize>,
    pub target: usize,
    pub overlap: usize,
    pub source: usize,
}

impl ReducedSet {
    /// Inclusive range of admissible Hamming weights on the residue.
    pub fn weight_window(&self) -> (usize, usize) {
        (
            self.target.saturating_sub(self.overlap),
            self.target.min(self.members.len()),
        )
    }

    pub fn admissible_count(&self) -> BigUint {
        let (lo, hi) = self.weight_window();
        (lo..=hi).map(|w| binomial(self.members.len(), w)).sum()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Selection {
    pub disjoint_sets: Vec<DisjointSet>,
    pub reduced_sets: Vec<ReducedSet>,
    pub threshold: usize,
}

impl Selection {
    pub fn empty() -> Self {
        Selection::default()
    }

    pub fn is_empty(&self) -> bool {
        self.disjoint_sets.is_empty() && self.reduced_sets.is_empty()
    }

    pub fn used(&self) -> BTreeSet<usize> {
        self.disjoint_sets
            .iter()
            .flat_map(|s| s.members.iter())
            .chain(self.reduced_sets.iter().flat_map(|s| s.members.iter()))
            .copied()
            .collect()
    }

    /// Block layout: selected sets in order, then the unconstrained
    /// variables. Entry `i` is the position of variable `i`.
    pub fn permutation(&self, n: usize) -> Vec<usize> {
        let used = self.used();
        let order = self
            .disjoint_sets
            .iter()
            .flat_map(|s| s.members.iter())
            .chain(self.reduced_sets.iter().flat_map(|s| s.members.iter()))
            .copied()
            .chain((0..n).filter(|i| !used.contains(i)));
        let mut perm = vec![0; n];
        for (pos, var) in order.enumerate() {
            perm[var] = pos;
        }
        perm
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = BTreeSet::new();
        let sets = self
            .disjoint_sets
            .iter()
            .map(|s| &s.members)
            .chain(self.reduced_sets.iter().map(|s| &s.members));
        for members in sets {
            if members.is_empty() {
                return Err(Error::Contract("selection contains an empty set".into()));
            }
            for &i in members {
                if i >= n {
                    return Err(Error::QubitOutOfRange { qubit: i, width: n });
                }
                if !seen.insert(i) {
                    return Err(Error::Contract(format!(
                        "variable x{} appears in two selected sets",
                        i + 1
                    )));
                }
            }
        }
        for s in &self.disjoint_sets {
            match s.kind {
                BlockKind::Dicke { weight } if weight > s.members.len() => {
                    return Err(Error::Infeasible(format!(
                        "weight {weight} on {} variables",
                        s.members.len()
                    )));
                }
                BlockKind::Ghz { parity } if parity > 1 => {
                    return Err(Error::Domain(format!("parity {parity} is not a bit")));
                }
                _ => {}
            }
        }
        for r in &self.reduced_sets {
            if r.overlap > self.threshold {
                return Err(Error::Contract(format!(
                    "reduced set overlap {} exceeds threshold {}",
                    r.overlap, self.threshold
                )));
            }
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| {
        acc * BigUint::from(n - i) / BigUint::from(i + 1)
    })
}

/// Orders constraints by `C(|C|, b) / 2^|C|` without rounding.
fn restriction_order(a: &CardinalityConstraint, b: &CardinalityConstraint) -> Ordering {
    let lhs = binomial(a.members.len(), a.target) << b.members.len();
    let rhs = binomial(b.members.len(), b.target) << a.members.len();
    lhs.cmp(&rhs)
}

fn greedy_cardinality(
    constraints: &[(usize, CardinalityConstraint)],
    threshold: usize,
    used: &mut BTreeSet<usize>,
    selection: &mut Selection,
) -> Result<()> {
    if let Some((j, c)) = constraints.iter().find(|(_, c)| !c.is_feasible()) {
        return Err(Error::Infeasible(format!(
            "constraint {}: target {} exceeds {} members",
            j + 1,
            c.target,
            c.members.len()
        )));
    }
    let mut order: Vec<&(usize, CardinalityConstraint)> = constraints.iter().collect();
    order.sort_by(|a, b| restriction_order(&a.1, &b.1));

    let mut rejected = Vec::new();
    for entry in order {
        let (j, c) = entry;
        if c.members.is_disjoint(used) {
            used.extend(c.members.iter().copied());
            selection.disjoint_sets.push(DisjointSet {
                members: c.members.clone(),
                kind: BlockKind::Dicke { weight: c.target },
                source: *j,
            });
        } else {
            rejected.push(entry);
        }
    }

    if threshold == 0 {
        return Ok(());
    }
    for (j, c) in rejected {
        let overlap = c.members.intersection(used).count();
        if overlap > threshold {
            continue;
        }
        let residue: BTreeSet<usize> = c.members.difference(used).copied().collect();
        if residue.is_empty() {
            continue;
        }
        used.extend(residue.iter().copied());
        selection.reduced_sets.push(ReducedSet {
            members: residue,
            target: c.target,
            overlap,
            source: *j,
        });
    }
    Ok(())
}

fn greedy_parity(
    constraints: &[(usize, LinearConstraint)],
    used: &mut BTreeSet<usize>,
    selection: &mut Selection,
) -> Result<()> {
    let mut candidates = Vec::new();
    for (j, c) in constraints {
        let normalized = normalize_linear(c).map_err(|e| match e {
            Error::Infeasible(m) => Error::Infeasible(format!("constraint {}: {m}", j + 1)),
            other => other,
        })?;
        let (set, parity) = parity_set(&normalized)?;
        if !set.is_empty() {
            candidates.push((*j, set, parity));
        }
    }
    candidates.sort_by_key(|(_, set, _)| set.len());
    for (j, set, parity) in candidates {
        if set.is_disjoint(used) {
            used.extend(set.iter().copied());
            selection.disjoint_sets.push(DisjointSet {
                members: set,
                kind: BlockKind::Ghz { parity },
                source: j,
            });
        }
    }
    Ok(())
}

/// Greedy disjoint selection of cardinality constraints, most restrictive
/// first, followed (for `threshold > 0`) by a pass that admits the residues
/// of constraints overlapping the selection in at most `threshold`
/// variables. Ties keep input order.
pub fn preprocess_cardinality(
    constraints: &[CardinalityConstraint],
    threshold: usize,
) -> Result<Selection> {
    let indexed: Vec<_> = constraints.iter().cloned().enumerate().collect();
    let mut selection = Selection {
        threshold,
        ..Selection::default()
    };
    greedy_cardinality(&indexed, threshold, &mut BTreeSet::new(), &mut selection)?;
    Ok(selection)
}

/// Greedy disjoint selection of parity sets, smallest first. Ties keep
/// input order and empty parity sets are skipped.
pub fn preprocess_parity(constraints: &[LinearConstraint]) -> Result<Selection> {
    let indexed: Vec<_> = constraints.iter().cloned().enumerate().collect();
    let mut selection = Selection::empty();
    greedy_parity(&indexed, &mut BTreeSet::new(), &mut selection)?;
    Ok(selection)
}

/// Cardinality constraints first, then parity sets of the remaining
/// constraints on the variables still free.
pub fn preprocess_mixed(constraints: &[LinearConstraint], threshold: usize) -> Result<Selection> {
    let (cardinality, general): (Vec<_>, Vec<_>) = constraints
        .iter()
        .cloned()
        .enumerate()
        .partition(|(_, c)| c.as_cardinality().is_some());
    let cardinality: Vec<_> = cardinality
        .into_iter()
        .map(|(j, c)| (j, c.as_cardinality().expect("partitioned")))
        .collect();
    let mut used = BTreeSet::new();
    let mut selection = Selection {
        threshold,
        ..Selection::default()
    };
    greedy_cardinality(&cardinality, threshold, &mut used, &mut selection)?;
    greedy_parity(&general, &mut used, &mut selection)?;
    Ok(selection)
}

/// Number of basis states supported by the initializer of `selection`.
pub fn search_space_size(selection: &Selection, n: usize) -> BigUint {
    let mut size = BigUint::one() << (n - selection.used().len().min(n));
    for s in &selection.disjoint_sets {
        size *= match s.kind {
            BlockKind::Dicke { weight } => binomial(s.members.len(), weight),
            BlockKind::Ghz { .. } => BigUint::one() << (s.members.len() - 1),
        };
    }
    for r in &selection.reduced_sets {
        size *= r.admissible_count();
    }
    size
}

fn ratio(s: &BigUint, f: &BigUint) -> f64 {
    // Both fit comfortably in f64 for any register we can describe.
    s.to_f64().unwrap_or(f64::INFINITY) / f.to_f64().unwrap_or(f64::INFINITY)
}

/// `asin(sqrt(|S| / |F|))`.
pub fn rotation_angle(f: &BigUint, s: &BigUint) -> Result<f64> {
    if s.is_zero() || s > f {
        return Err(Error::Domain(format!(
            "need 1 <= |S| <= |F|, got |S| = {s}, |F| = {f}"
        )));
    }
    Ok(ratio(s, f).sqrt().min(1.0).asin())
}

/// Query count maximizing the success probability; the half-way case
/// rounds up.
pub fn optimal_queries(f: &BigUint, s: &BigUint) -> Result<usize> {
    let theta = rotation_angle(f, s)?;
    let x = PI / (4.0 * theta) - 0.5;
    Ok((x + 0.5).floor().max(0.0) as usize)
}

/// An initialization recipe with its derived search-space size.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    pub label: String,
    pub selection: Selection,
    pub n: usize,
    pub search_space: BigUint,
    pub solutions: Option<BigUint>,
    pub kappa_opt: Option<usize>,
}

impl Strategy {
    pub fn new(
        label: impl Into<String>,
        selection: Selection,
        n: usize,
        solutions: Option<BigUint>,
    ) -> Result<Self> {
        selection.validate(n)?;
        let search_space = search_space_size(&selection, n);
        let kappa_opt = match &solutions {
            Some(s) => Some(optimal_queries(&search_space, s)?),
            None => None,
        };
        Ok(Strategy {
            label: label.into(),
            selection,
            n,
            search_space,
            solutions,
            kappa_opt,
        })
    }

    pub fn uniform(n: usize, solutions: Option<BigUint>) -> Result<Self> {
        Strategy::new("uniform", Selection::empty(), n, solutions)
    }

    /// `2^n / |F|`.
    pub fn reduction_factor(&self) -> f64 {
        ratio(&(BigUint::one() << self.n), &self.search_space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, Strategy as _};

    fn card(members: &[usize], b: usize) -> CardinalityConstraint {
        // 1-based in the test literals, as printed in reports.
        CardinalityConstraint::new(members.iter().map(|i| i - 1), b).unwrap()
    }

    fn lin(terms: &[(usize, i64)], b: i64) -> LinearConstraint {
        LinearConstraint::new(terms.iter().map(|&(i, a)| (i - 1, a)), b).unwrap()
    }

    fn set(members: &[usize]) -> BTreeSet<usize> {
        members.iter().map(|i| i - 1).collect()
    }

    fn exact_cover_constraints() -> Vec<CardinalityConstraint> {
        vec![
            card(&[1, 2, 3, 4], 1),
            card(&[3, 7, 8], 1),
            card(&[2, 5, 10], 1),
            card(&[5, 6, 7], 1),
            card(&[1, 3, 7, 10], 1),
            card(&[2, 6, 9], 1),
            card(&[4, 8, 9, 10], 1),
        ]
    }

    /// Enumerates assignments to decide feasibility independently of gcd
    /// arithmetic.
    fn has_binary_solution(c: &LinearConstraint) -> bool {
        let vars: Vec<usize> = c.members().into_iter().collect();
        (0u64..1 << vars.len()).any(|bits| {
            let x = vars
                .iter()
                .enumerate()
                .fold(0u64, |x, (k, &v)| x | ((bits >> k & 1) << v));
            c.is_satisfied(x)
        })
    }

    #[test]
    fn normalization() {
        assert_eq!(
            normalize_linear(&lin(&[(1, 2), (2, 4)], 6)).unwrap(),
            lin(&[(1, 1), (2, 2)], 3)
        );
        let bad = lin(&[(1, 2), (2, 4)], 3);
        assert!(!has_binary_solution(&bad));
        assert!(matches!(normalize_linear(&bad), Err(Error::Infeasible(_))));
        let unchanged = lin(&[(1, 1), (2, 3)], 2);
        assert_eq!(normalize_linear(&unchanged).unwrap(), unchanged);
    }

    #[test]
    fn parity_sets() {
        let c = lin(&[(1, 2), (2, 3), (3, 1)], 4);
        assert_eq!(parity_set(&c).unwrap(), (set(&[2, 3]), 0));
        // Every solution of the constraint satisfies the parity condition.
        for x in 0u64..8 {
            if c.is_satisfied(x) {
                assert_eq!(((x >> 1 & 1) + (x >> 2 & 1)) % 2, 0);
            }
        }
        assert_eq!(
            parity_set(&lin(&[(1, 1), (2, 1)], 1)).unwrap(),
            (set(&[1, 2]), 1)
        );
        assert!(matches!(
            parity_set(&lin(&[(1, 2), (2, 2)], 1)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn algorithm_one_on_exact_cover_instance() {
        let cs = exact_cover_constraints();
        let sel = preprocess_cardinality(&cs, 0).unwrap();
        let picked: Vec<_> = sel.disjoint_sets.iter().map(|s| s.source + 1).collect();
        assert_eq!(picked, vec![1, 4]);
        assert!(sel.reduced_sets.is_empty());
        assert_eq!(search_space_size(&sel, 10), BigUint::from(96u32));

        let sel = preprocess_cardinality(&cs, 1).unwrap();
        assert_eq!(sel.disjoint_sets.len(), 2);
        assert_eq!(sel.reduced_sets.len(), 1);
        let r = &sel.reduced_sets[0];
        assert_eq!(
            (r.source + 1, &r.members, r.target, r.overlap),
            (7, &set(&[8, 9, 10]), 1, 1)
        );
        assert_eq!(r.admissible_count(), BigUint::from(4u32));
        assert_eq!(search_space_size(&sel, 10), BigUint::from(48u32));
    }

    #[test]
    fn single_constraint_is_selected_alone() {
        for eta in 0..3 {
            let sel = preprocess_cardinality(&[card(&[1, 2], 1)], eta).unwrap();
            assert_eq!(sel.disjoint_sets.len(), 1);
            assert_eq!(sel.disjoint_sets[0].members, set(&[1, 2]));
            assert!(sel.reduced_sets.is_empty());
        }
    }

    #[test]
    fn infeasible_cardinality_is_rejected() {
        assert!(matches!(
            preprocess_cardinality(&[card(&[1, 2], 3)], 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn algorithm_two_tie_break_and_weighted_instance() {
        let sel =
            preprocess_parity(&[lin(&[(1, 1), (2, 1)], 1), lin(&[(2, 1), (3, 1)], 0)]).unwrap();
        assert_eq!(sel.disjoint_sets.len(), 1);
        assert_eq!(sel.disjoint_sets[0].source, 0);

        let sel = preprocess_parity(&[lin(&[(1, 1), (2, 1), (3, 1)], 1)]).unwrap();
        assert_eq!(sel.disjoint_sets[0].members, set(&[1, 2, 3]));
        assert_eq!(sel.disjoint_sets[0].kind, BlockKind::Ghz { parity: 1 });

        assert!(matches!(
            preprocess_parity(&[lin(&[(1, 2), (2, 2)], 1)]),
            Err(Error::Infeasible(_))
        ));
        // Normalization exposes odd coefficients hidden behind a common factor.
        let sel = preprocess_parity(&[lin(&[(1, 2), (2, 4)], 2)]).unwrap();
        assert_eq!(sel.disjoint_sets[0].members, set(&[1]));
        assert_eq!(sel.disjoint_sets[0].kind, BlockKind::Ghz { parity: 1 });
    }

    #[test]
    fn mixed_pipeline_prefers_cardinality() {
        let cs = vec![
            lin(&[(1, 1), (2, 2)], 1),
            lin(&[(1, 1), (3, 1)], 1),
            lin(&[(2, 1), (4, 3)], 4),
        ];
        let sel = preprocess_mixed(&cs, 0).unwrap();
        assert_eq!(sel.disjoint_sets[0].source, 1);
        assert_eq!(sel.disjoint_sets[0].kind, BlockKind::Dicke { weight: 1 });
        assert_eq!(sel.disjoint_sets[1].source, 2);
        assert_eq!(sel.disjoint_sets[1].members, set(&[2, 4]));
        assert_eq!(sel.disjoint_sets.len(), 2);
    }

    #[test]
    fn search_space_examples() {
        assert_eq!(
            search_space_size(&Selection::empty(), 10),
            BigUint::from(1024u32)
        );
        let ghz = Selection {
            disjoint_sets: vec![
                DisjointSet {
                    members: set(&[7, 8]),
                    kind: BlockKind::Ghz { parity: 0 },
                    source: 1,
                },
                DisjointSet {
                    members: set(&[2, 5]),
                    kind: BlockKind::Ghz { parity: 0 },
                    source: 2,
                },
            ],
            ..Selection::default()
        };
        assert_eq!(search_space_size(&ghz, 10), BigUint::from(256u32));
    }

    #[test]
    fn reduced_window_is_clamped() {
        let r = ReducedSet {
            members: set(&[1]),
            target: 2,
            overlap: 2,
            source: 0,
        };
        assert_eq!(r.weight_window(), (0, 1));
        assert_eq!(r.admissible_count(), BigUint::from(2u32));
        let r = ReducedSet {
            members: set(&[1, 2, 3]),
            target: 2,
            overlap: 1,
            source: 0,
        };
        assert_eq!(r.weight_window(), (1, 2));
        assert_eq!(r.admissible_count(), BigUint::from(6u32));
    }

    #[test]
    fn optimal_query_counts() {
        let q = |f: u32, s: u32| optimal_queries(&BigUint::from(f), &BigUint::from(s)).unwrap();
        assert_eq!(q(1024, 1), 25);
        assert_eq!(q(96, 1), 7);
        assert_eq!(q(48, 1), 5);
        assert_eq!(q(384, 1), 15);
        assert_eq!(q(256, 1), 12);
        assert_eq!(q(4, 1), 1);
        assert_eq!(q(5, 5), 0);
        assert!(optimal_queries(&BigUint::from(4u32), &BigUint::zero()).is_err());
        assert!(optimal_queries(&BigUint::from(4u32), &BigUint::from(5u32)).is_err());
    }

    #[test]
    fn sort_key_prefers_larger_sets_for_weight_one() {
        for a in 2..12 {
            for b in a + 1..13 {
                let small = card(&(1..=a).collect::<Vec<_>>(), 1);
                let large = card(&(1..=b).collect::<Vec<_>>(), 1);
                assert_eq!(restriction_order(&large, &small), Ordering::Less);
            }
        }
    }

    #[test]
    fn permutation_is_block_ordered_bijection() {
        let sel = preprocess_cardinality(&exact_cover_constraints(), 1).unwrap();
        let perm = sel.permutation(10);
        let mut sorted = perm.clone();
        sorted.sort();
        assert_eq!(sorted, (0..10).collect::<Vec<_>>());
        // C1 = {1,2,3,4} occupies the first four positions.
        assert_eq!(&perm[..4], &[0, 1, 2, 3]);
    }

    fn arb_cardinality(
        n: usize,
    ) -> impl proptest::strategy::Strategy<Value = Vec<CardinalityConstraint>> {
        proptest::collection::vec(
            (proptest::collection::btree_set(0..n, 1..=5), 0usize..3).prop_map(|(m, b)| {
                let b = b.min(m.len());
                CardinalityConstraint {
                    members: m,
                    target: b,
                }
            }),
            0..8,
        )
    }

    fn assert_pairwise_disjoint(sel: &Selection) {
        let sets: Vec<&BTreeSet<usize>> = sel
            .disjoint_sets
            .iter()
            .map(|s| &s.members)
            .chain(sel.reduced_sets.iter().map(|s| &s.members))
            .collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                assert!(sets[i].is_disjoint(sets[j]));
            }
        }
    }

    proptest! {
        #[test]
        fn selections_are_disjoint(cs in arb_cardinality(10), eta in 0usize..3) {
            let sel = preprocess_cardinality(&cs, eta).unwrap();
            assert_pairwise_disjoint(&sel);
            sel.validate(10).unwrap();
            for r in &sel.reduced_sets {
                prop_assert!(r.overlap <= eta && !r.members.is_empty());
            }
        }

        #[test]
        fn adding_a_set_never_grows_the_search_space(cs in arb_cardinality(10), eta in 0usize..3) {
            let sel = preprocess_cardinality(&cs, eta).unwrap();
            let mut partial = Selection { threshold: eta, ..Selection::default() };
            let mut last = search_space_size(&partial, 10);
            for s in &sel.disjoint_sets {
                partial.disjoint_sets.push(s.clone());
                let next = search_space_size(&partial, 10);
                prop_assert!(next <= last);
                last = next;
            }
            for r in &sel.reduced_sets {
                partial.reduced_sets.push(r.clone());
                let next = search_space_size(&partial, 10);
                prop_assert!(next <= last);
                last = next;
            }
        }

        #[test]
        fn duplicating_selected_constraints_changes_nothing(cs in arb_cardinality(10), eta in 0usize..3) {
            let sel = preprocess_cardinality(&cs, eta).unwrap();
            let mut dup = cs.clone();
            for s in &sel.disjoint_sets {
                dup.push(cs[s.source].clone());
            }
            let again = preprocess_cardinality(&dup, eta).unwrap();
            prop_assert_eq!(&again.disjoint_sets, &sel.disjoint_sets);
            prop_assert_eq!(&again.reduced_sets, &sel.reduced_sets);
        }

        #[test]
        fn parity_selection_is_disjoint_and_duplicate_stable(
            cs in proptest::collection::vec(
                (proptest::collection::btree_map(0usize..10, 1i64..4, 1..=5), 0i64..6)
                    .prop_map(|(m, b)| LinearConstraint::new(m, b).unwrap()),
                0..8,
            )
        ) {
            match preprocess_parity(&cs) {
                Ok(sel) => {
                    assert_pairwise_disjoint(&sel);
                    let mut dup = cs.clone();
                    for s in &sel.disjoint_sets {
                        dup.push(cs[s.source].clone());
                    }
                    prop_assert_eq!(preprocess_parity(&dup).unwrap().disjoint_sets, sel.disjoint_sets);
                }
                Err(e) => prop_assert!(matches!(e, Error::Infeasible(_))),
            }
        }
    }
}
