//! Depolarizing noise by Monte-Carlo Pauli trajectories over circuits lowered
//! to {RZ, H, CNOT}.
//!
//! After every one-qubit base gate a uniformly random X, Y or Z is inserted
//! with probability `p1`; after every CNOT one of the 15 non-identity
//! two-qubit Paulis with probability `p2`. Oracle stages are noise-free.

mod trajectory;
pub mod transpile;

use std::io::Write;

use rayon::prelude::*;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::grover::{diffusion_circuit, OraclePredicate};
use crate::prep::Initializer;
use crate::rng;

pub use transpile::{transpile, TranspiledCircuit};

/// Stream tags for error sampling; measurement draws use the boundary index.
const ONE_QUBIT_ERRORS: u64 = 0xE22_0000_0001;
const TWO_QUBIT_ERRORS: u64 = 0xE22_0000_0002;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(NoiseModel { p1, p2 })
    }

    pub fn noiseless() -> Self {
        NoiseModel { p1: 0.0, p2: 0.0 }
    }

    /// 1e-5 per one-qubit gate, 1e-4 per two-qubit gate.
    pub fn reference() -> Self {
        NoiseModel { p1: 1e-5, p2: 1e-4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotPlan {
    pub runs: usize,
    pub shots_per_run: usize,
    pub seed: u64,
}

impl ShotPlan {
    pub fn new(runs: usize, shots_per_run: usize, seed: u64) -> Result<Self> {
        if runs == 0 || shots_per_run == 0 {
            return Err(Error::Domain("runs and shots must be at least 1".into()));
        }
        Ok(ShotPlan {
            runs,
            shots_per_run,
            seed,
        })
    }

    /// 20 runs of 250 shots.
    pub fn desk(seed: u64) -> Self {
        ShotPlan {
            runs: 20,
            shots_per_run: 250,
            seed,
        }
    }

    /// 20 runs of 1000 shots.
    pub fn full(seed: u64) -> Self {
        ShotPlan {
            runs: 20,
            shots_per_run: 1000,
            seed,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Stage {
    Gates(TranspiledCircuit),
    Oracle(OraclePredicate),
}

/// Stages on a shared register, measured after selected stages.
#[derive(Clone, Debug)]
pub struct NoisyProgram {
    n: usize,
    width: usize,
    stages: Vec<Stage>,
    measure_after: Vec<usize>,
    predicate: OraclePredicate,
}

impl NoisyProgram {
    fn assemble(
        stages: Vec<Stage>,
        measure_after: Vec<usize>,
        predicate: OraclePredicate,
    ) -> Result<Self> {
        let n = predicate.num_qubits();
        let mut width = n;
        for st in &stages {
            if let Stage::Gates(tc) = st {
                if tc.data_width() != n {
                    return Err(Error::WidthMismatch {
                        expected: n,
                        actual: tc.data_width(),
                    });
                }
                width = width.max(tc.width());
            }
        }
        if width > crate::simulator::MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "{width} qubits including ancillas"
            )));
        }
        Ok(NoisyProgram {
            n,
            width,
            stages,
            measure_after,
            predicate,
        })
    }

    /// Initializer, then `kappa` rounds of oracle and diffusion, measured
    /// after the initializer and after every diffusion.
    pub fn grover(init: &Initializer, f: &OraclePredicate, kappa: usize) -> Result<Self> {
        let v = init.circuit()?;
        let d = TranspiledCircuit::new(&diffusion_circuit(v, init.num_qubits())?)?;
        let mut stages = vec![Stage::Gates(TranspiledCircuit::new(v)?)];
        let mut measure_after = vec![0];
        for _ in 0..kappa {
            stages.push(Stage::Oracle(f.clone()));
            stages.push(Stage::Gates(d.clone()));
            measure_after.push(stages.len() - 1);
        }
        NoisyProgram::assemble(stages, measure_after, f.clone())
    }

    /// One circuit, lowered here, measured at the end.
    pub fn circuit(circuit: &Circuit, predicate: &OraclePredicate) -> Result<Self> {
        NoisyProgram::assemble(
            vec![Stage::Gates(TranspiledCircuit::new(circuit)?)],
            vec![0],
            predicate.clone(),
        )
    }

    /// One circuit that must already be in the basis.
    pub fn transpiled(circuit: &Circuit, predicate: &OraclePredicate) -> Result<Self> {
        NoisyProgram::assemble(
            vec![Stage::Gates(TranspiledCircuit::from_basis(circuit)?)],
            vec![0],
            predicate.clone(),
        )
    }

    pub fn num_boundaries(&self) -> usize {
        self.measure_after.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoisyOutcome {
    /// Solution counts indexed by boundary, then run.
    pub counts: Vec<Vec<usize>>,
    pub shots_per_run: usize,
    /// Shots with at least one error event.
    pub errored_shots: usize,
}

impl NoisyOutcome {
    pub fn runs(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    /// Mean solution fraction over runs at `boundary`.
    pub fn mean_fraction(&self, boundary: usize) -> f64 {
        let c = &self.counts[boundary];
        c.iter().sum::<usize>() as f64 / (c.len() * self.shots_per_run) as f64
    }

    /// Sample standard deviation over runs of the solution fraction.
    pub fn std_fraction(&self, boundary: usize) -> f64 {
        let c = &self.counts[boundary];
        if c.len() < 2 {
            return 0.0;
        }
        let m = self.mean_fraction(boundary);
        let var = c
            .iter()
            .map(|&x| (x as f64 / self.shots_per_run as f64 - m).powi(2))
            .sum::<f64>()
            / (c.len() - 1) as f64;
        var.sqrt()
    }

    /// Standard error of [`NoisyOutcome::mean_fraction`].
    pub fn std_error(&self, boundary: usize) -> f64 {
        self.std_fraction(boundary) / (self.runs() as f64).sqrt()
    }
}

/// Runs every shot of `plan` through `program` and counts solutions at
/// each measurement boundary. Shot `s` of run `r` is fully determined by
/// `(plan.seed, r, s)`; its measurement at boundary `b` uses the uniform
/// `shot_uniform(tagged(run_seed, b), s)`, so without noise the last
/// boundary of a one-stage program reproduces `StateVector::sample`.
pub fn run_noisy(
    program: &NoisyProgram,
    plan: &ShotPlan,
    noise: &NoiseModel,
) -> Result<NoisyOutcome> {
    let plan = ShotPlan::new(plan.runs, plan.shots_per_run, plan.seed)?;
    let noise = NoiseModel::new(noise.p1, noise.p2)?;
    let prepared = trajectory::Prepared::new(program);
    let total = plan.runs * plan.shots_per_run;
    let shots: Vec<(bool, Vec<bool>)> = (0..total)
        .into_par_iter()
        .map_init(
            || {
                (
                    trajectory::Register::new(program.n, program.width),
                    Vec::new(),
                )
            },
            |(reg, scratch), idx| {
                let (r, s) = (idx / plan.shots_per_run, idx % plan.shots_per_run);
                let seed = rng::run_seed(plan.seed, r);
                let mut rng1 = rng::shot_rng(rng::tagged(seed, ONE_QUBIT_ERRORS), s);
                let mut rng2 = rng::shot_rng(rng::tagged(seed, TWO_QUBIT_ERRORS), s);
                let errors = prepared.sample_errors(&noise, &mut rng1, &mut rng2);
                let draw = |b: usize| rng::shot_uniform(rng::tagged(seed, b as u64), s);
                (
                    !errors.is_empty(),
                    prepared.run_shot(program, &errors, reg, scratch, draw),
                )
            },
        )
        .collect();
    let mut counts = vec![vec![0usize; plan.runs]; program.num_boundaries()];
    let mut errored_shots = 0;
    for (idx, (errored, flags)) in shots.into_iter().enumerate() {
        errored_shots += usize::from(errored);
        let r = idx / plan.shots_per_run;
        for (b, hit) in flags.into_iter().enumerate() {
            counts[b][r] += usize::from(hit);
        }
    }
    Ok(NoisyOutcome {
        counts,
        shots_per_run: plan.shots_per_run,
        errored_shots,
    })
}

/// One row of the per-run counts table.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRow {
    pub strategy: String,
    pub kappa: usize,
    pub run: usize,
    pub count: usize,
    pub mode: String,
}

/// Rows for every run at boundary `kappa`.
pub fn count_rows(
    strategy: &str,
    kappa: usize,
    outcome: &NoisyOutcome,
    mode: &str,
) -> Vec<CountRow> {
    outcome.counts[kappa]
        .iter()
        .enumerate()
        .map(|(run, &count)| CountRow {
            strategy: strategy.into(),
            kappa,
            run,
            count,
            mode: mode.into(),
        })
        .collect()
}

/// Writes `strategy,kappa,run,count,mode`.
pub fn write_counts_csv<W: Write>(out: W, rows: &[CountRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["strategy", "kappa", "run", "count", "mode"])?;
    for r in rows {
        w.write_record([
            r.strategy.clone(),
            r.kappa.to_string(),
            r.run.to_string(),
            r.count.to_string(),
            r.mode.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::constraints::Selection;
    use crate::prep::build_initializer;
    use crate::simulator::{parse_bitstring, StateVector};

    #[test]
    fn parameters_are_validated() {
        assert!(NoiseModel::new(-0.1, 0.0).is_err());
        assert!(NoiseModel::new(0.0, 1.5).is_err());
        assert!(ShotPlan::new(0, 10, 1).is_err());
        assert_eq!(
            ShotPlan::desk(3).runs * ShotPlan::desk(3).shots_per_run,
            5000
        );
    }

    #[test]
    fn zero_noise_matches_ideal_sampling() {
        let mut c = Circuit::new(4);
        for g in [
            Gate::h(0),
            Gate::ry(0.4, 1),
            Gate::cx(0, 2),
            Gate::cry(1.2, 1, 3),
            Gate::x(2),
        ] {
            c.push(g).unwrap();
        }
        c.push(Gate::mcx(&[0, 1, 2], 3).unwrap()).unwrap();
        let t = transpile(&c).unwrap();
        let accept = OraclePredicate::new(4, |x| x % 3 == 1);
        let plan = ShotPlan::new(3, 400, 99).unwrap();
        let out = run_noisy(
            &NoisyProgram::transpiled(&t, &accept).unwrap(),
            &plan,
            &NoiseModel::noiseless(),
        )
        .unwrap();
        let mut s = StateVector::new_zero(t.width()).unwrap();
        s.apply_circuit(&t).unwrap();
        for r in 0..plan.runs {
            let hist = s
                .sample(plan.shots_per_run, rng::run_seed(plan.seed, r))
                .unwrap();
            let expected: usize = hist
                .iter()
                .filter(|(k, _)| accept.accepts(parse_bitstring(k).unwrap() & 0xF))
                .map(|(_, v)| v)
                .sum();
            assert_eq!(out.counts[0][r], expected);
        }
        assert_eq!(out.errored_shots, 0);
    }

    #[test]
    fn full_depolarization_of_a_hadamard_is_uniform() {
        let c = Circuit::from_gates(1, [Gate::h(0)]).unwrap();
        let one = OraclePredicate::new(1, |x| x == 1);
        let plan = ShotPlan::new(1, 10_000, 5).unwrap();
        let out = run_noisy(
            &NoisyProgram::circuit(&c, &one).unwrap(),
            &plan,
            &NoiseModel::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        let sigma = (10_000.0f64 * 0.25).sqrt();
        assert!((out.counts[0][0] as f64 - 5000.0).abs() < 5.0 * sigma);
        assert_eq!(out.errored_shots, 10_000);
    }

    #[test]
    fn certain_pauli_after_identity_rotation_flips_two_thirds() {
        // X and Y flip |0>, Z does not.
        let c = Circuit::from_gates(1, [Gate::rz(0.0, 0)]).unwrap();
        let one = OraclePredicate::new(1, |x| x == 1);
        let plan = ShotPlan::new(1, 9000, 11).unwrap();
        let out = run_noisy(
            &NoisyProgram::circuit(&c, &one).unwrap(),
            &plan,
            &NoiseModel::new(1.0, 0.0).unwrap(),
        )
        .unwrap();
        let sigma = (9000.0f64 * 2.0 / 9.0).sqrt();
        assert!((out.counts[0][0] as f64 - 6000.0).abs() < 5.0 * sigma);
    }

    #[test]
    fn certain_two_qubit_pauli_statistics() {
        // On |00>, a random non-identity Pauli pair leaves the first qubit
        // flipped in 8 of 15 cases.
        let c = Circuit::from_gates(2, [Gate::cx(0, 1)]).unwrap();
        let first = OraclePredicate::new(2, |x| x & 1 == 1);
        let plan = ShotPlan::new(1, 15_000, 2).unwrap();
        let out = run_noisy(
            &NoisyProgram::circuit(&c, &first).unwrap(),
            &plan,
            &NoiseModel::new(0.0, 1.0).unwrap(),
        )
        .unwrap();
        let p: f64 = 8.0 / 15.0;
        let sigma = (15_000.0 * p * (1.0 - p)).sqrt();
        assert!((out.counts[0][0] as f64 - 15_000.0 * p).abs() < 5.0 * sigma);
    }

    #[test]
    fn noisy_runs_are_deterministic_and_use_the_query_prefix() {
        let init = build_initializer(&Selection::empty(), 5).unwrap();
        let f = OraclePredicate::from_solutions(5, [0b10110]);
        let plan = ShotPlan::new(4, 100, 8).unwrap();
        let noise = NoiseModel::new(1e-3, 1e-2).unwrap();
        let a = run_noisy(&NoisyProgram::grover(&init, &f, 4).unwrap(), &plan, &noise).unwrap();
        let b = run_noisy(&NoisyProgram::grover(&init, &f, 4).unwrap(), &plan, &noise).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.len(), 5);
        assert!(a.errored_shots > 0);
        // A shorter program sees the same errors on its prefix.
        let short = run_noisy(&NoisyProgram::grover(&init, &f, 2).unwrap(), &plan, &noise).unwrap();
        assert_eq!(short.counts[..], a.counts[..3]);
    }

    #[test]
    fn degradation_is_monotone_in_the_two_qubit_rate() {
        let init = build_initializer(&Selection::empty(), 6).unwrap();
        let f = OraclePredicate::from_solutions(6, [0b101101]);
        let program = NoisyProgram::grover(&init, &f, 6).unwrap();
        let plan = ShotPlan::new(10, 400, 21).unwrap();
        let points: Vec<(f64, f64)> = [0.0, 1e-5, 1e-4, 1e-3, 1e-2]
            .iter()
            .map(|&p2| {
                let out = run_noisy(&program, &plan, &NoiseModel::new(1e-5, p2).unwrap()).unwrap();
                (out.mean_fraction(6), out.std_error(6))
            })
            .collect();
        for w in points.windows(2) {
            let ((a, sa), (b, sb)) = (w[0], w[1]);
            assert!(b <= a + 3.0 * (sa * sa + sb * sb).sqrt(), "{points:?}");
        }
        assert!(points[4].0 < points[0].0);
    }

    #[test]
    fn csv_rows() {
        let out = NoisyOutcome {
            counts: vec![vec![1, 2], vec![3, 4]],
            shots_per_run: 10,
            errored_shots: 0,
        };
        let mut buf = Vec::new();
        write_counts_csv(&mut buf, &count_rows("uniform", 1, &out, "noisy")).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "strategy,kappa,run,count,mode\nuniform,1,0,3,noisy\nuniform,1,1,4,noisy\n"
        );
        assert!((out.mean_fraction(1) - 0.35).abs() < 1e-12);
    }
}
