//! The Grover loop: phase oracle, initializer-conjugated diffusion and the
//! closed-form success law.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use crate::circuit::{Circuit, Gate};
use crate::constraints::{rotation_angle, Strategy};
use crate::error::{Error, Result};
use crate::noise::{run_noisy, NoiseModel, NoisyProgram, ShotPlan};
use crate::prep::{build_initializer, Initializer};
use crate::simulator::StateVector;

/// Boolean function over `n`-bit basis indices.
#[derive(Clone)]
pub struct OraclePredicate {
    n: usize,
    accept: Arc<dyn Fn(usize) -> bool + Send + Sync>,
}

impl OraclePredicate {
    pub fn new(n: usize, accept: impl Fn(usize) -> bool + Send + Sync + 'static) -> Self {
        OraclePredicate {
            n,
            accept: Arc::new(accept),
        }
    }

    /// Accepts exactly the listed indices.
    pub fn from_solutions(n: usize, solutions: impl IntoIterator<Item = usize>) -> Self {
        let set: std::collections::BTreeSet<usize> = solutions.into_iter().collect();
        OraclePredicate::new(n, move |x| set.contains(&x))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn accepts(&self, x: usize) -> bool {
        (self.accept)(x)
    }

    pub fn solutions(&self) -> Vec<usize> {
        (0..1usize << self.n).filter(|&x| self.accepts(x)).collect()
    }
}

impl fmt::Debug for OraclePredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OraclePredicate(n={})", self.n)
    }
}

/// Negates the amplitude of every accepted index.
pub fn apply_oracle(state: &mut StateVector, f: &OraclePredicate) -> Result<()> {
    if state.num_qubits() != f.n {
        return Err(Error::WidthMismatch {
            expected: state.num_qubits(),
            actual: f.n,
        });
    }
    for (x, a) in state.amplitudes_mut().iter_mut().enumerate() {
        if f.accepts(x) {
            *a = -*a;
        }
    }
    Ok(())
}

/// `X^n, H MCX H on the last qubit, X^n`: the reflection `I - 2|0><0|`.
pub fn diffusion_core(n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Domain("diffusion needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(Gate::x(q))?;
    }
    let last = n - 1;
    if n == 1 {
        c.push(Gate::z(0))?;
    } else {
        c.push(Gate::h(last))?;
        c.push(Gate::mcx(&(0..last).collect::<Vec<_>>(), last)?)?;
        c.push(Gate::h(last))?;
    }
    for q in 0..n {
        c.push(Gate::x(q))?;
    }
    Ok(c)
}

/// `V^dag`, the core, then `V`. As an operator this is
/// `-(2|psi0><psi0| - I)`.
pub fn diffusion_circuit(v: &Circuit, n: usize) -> Result<Circuit> {
    if v.ancilla_offset() != n {
        return Err(Error::WidthMismatch {
            expected: n,
            actual: v.ancilla_offset(),
        });
    }
    let mut c = Circuit::with_ancillas(n, v.num_ancillas());
    c.extend(&v.inverse())?;
    c.extend(&diffusion_core(n)?)?;
    c.extend(v)?;
    Ok(c)
}

/// `sin^2((2k + 1) theta)` with `theta = asin(sqrt(S / F))`.
pub fn success_probability(f: &BigUint, s: &BigUint, kappa: usize) -> Result<f64> {
    let theta = rotation_angle(f, s)?;
    Ok(((2 * kappa + 1) as f64 * theta).sin().powi(2))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    /// Matrix-free reflection about the initial state.
    Ideal,
    /// Diffusion applied as the gate-level circuit.
    CircuitExact,
    /// Transpiled circuit under stochastic Pauli noise; the trace holds
    /// observed solution frequencies.
    CircuitNoisy { noise: NoiseModel, plan: ShotPlan },
}

#[derive(Clone, Debug)]
pub struct GroverRun {
    pub label: String,
    pub mode: Mode,
    pub kappa: usize,
    /// Success probability (or frequency) after `k` queries, `k = 0..=kappa`.
    pub trace: Vec<f64>,
    /// Final state in exact modes.
    pub state: Option<StateVector>,
    /// Solution counts per query boundary and run, in noisy mode.
    pub counts: Option<Vec<Vec<usize>>>,
}

/// Rejects oracles that accept strings outside the search space.
pub fn check_containment(init: &Initializer, f: &OraclePredicate) -> Result<()> {
    if init.num_qubits() != f.n {
        return Err(Error::WidthMismatch {
            expected: init.num_qubits(),
            actual: f.n,
        });
    }
    match (0..1usize << f.n).find(|&x| f.accepts(x) && !init.contains(x)) {
        Some(x) => Err(Error::Contract(format!(
            "solution {} lies outside the search space",
            crate::simulator::bitstring(x, f.n)
        ))),
        None => Ok(()),
    }
}

pub fn run(
    strategy: &Strategy,
    f: &OraclePredicate,
    kappa: usize,
    mode: Mode,
) -> Result<GroverRun> {
    let init = build_initializer(&strategy.selection, strategy.n)?;
    run_with(&strategy.label, &init, f, kappa, mode)
}

pub fn run_with(
    label: &str,
    init: &Initializer,
    f: &OraclePredicate,
    kappa: usize,
    mode: Mode,
) -> Result<GroverRun> {
    check_containment(init, f)?;
    let n = init.num_qubits();
    let mut trace = Vec::with_capacity(kappa + 1);
    match &mode {
        Mode::Ideal => {
            let psi0 = init.prepare()?;
            let mut state = psi0.clone();
            trace.push(state.probability_of(|x| f.accepts(x)));
            for _ in 0..kappa {
                apply_oracle(&mut state, f)?;
                let overlap = psi0.inner(&state);
                for (a, b) in state.amplitudes_mut().iter_mut().zip(psi0.amplitudes()) {
                    *a = 2.0 * overlap * b - *a;
                }
                trace.push(state.probability_of(|x| f.accepts(x)));
            }
            Ok(GroverRun {
                label: label.into(),
                mode,
                kappa,
                trace,
                state: Some(state),
                counts: None,
            })
        }
        Mode::CircuitExact => {
            let v = init.circuit()?;
            let d = diffusion_circuit(v, n)?;
            let mut state = StateVector::new_zero(n)?;
            state.apply_circuit(v)?;
            trace.push(state.probability_of(|x| f.accepts(x)));
            for _ in 0..kappa {
                apply_oracle(&mut state, f)?;
                state.apply_circuit(&d)?;
                trace.push(state.probability_of(|x| f.accepts(x)));
            }
            Ok(GroverRun {
                label: label.into(),
                mode,
                kappa,
                trace,
                state: Some(state),
                counts: None,
            })
        }
        Mode::CircuitNoisy { noise, plan } => {
            let program = NoisyProgram::grover(init, f, kappa)?;
            let outcome = run_noisy(&program, plan, noise)?;
            let total = (plan.runs * plan.shots_per_run) as f64;
            for counts in &outcome.counts {
                trace.push(counts.iter().sum::<usize>() as f64 / total);
            }
            Ok(GroverRun {
                label: label.into(),
                mode,
                kappa,
                trace,
                state: None,
                counts: Some(outcome.counts),
            })
        }
    }
}
