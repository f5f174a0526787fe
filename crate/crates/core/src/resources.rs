//! Gate counting, the query-cost model and its sufficient conditions.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::io::Write;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::grover::diffusion_core;
use crate::prep::Initializer;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ResourceTally {
    pub total_gates: usize,
    pub two_qubit_gates: usize,
    pub depth: usize,
}

impl ResourceTally {
    pub fn get(&self, metric: Metric) -> usize {
        match metric {
            Metric::TotalGates => self.total_gates,
            Metric::TwoQubitGates => self.two_qubit_gates,
            Metric::Depth => self.depth,
        }
    }

    /// Componentwise `<=`.
    pub fn within(&self, bound: &ResourceTally) -> bool {
        self.total_gates <= bound.total_gates
            && self.two_qubit_gates <= bound.two_qubit_gates
            && self.depth <= bound.depth
    }
}

impl fmt::Display for ResourceTally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            self.total_gates, self.two_qubit_gates, self.depth
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Metric {
    TotalGates,
    TwoQubitGates,
    Depth,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::TotalGates, Metric::TwoQubitGates, Metric::Depth];

    pub fn name(&self) -> &'static str {
        match self {
            Metric::TotalGates => "gates",
            Metric::TwoQubitGates => "two_qubit",
            Metric::Depth => "depth",
        }
    }
}

/// Textbook Toffoli network: 6 CNOTs, 2 Hadamards and 7 T-type phase
/// rotations. Equal to the Toffoli up to a global phase.
pub fn toffoli_network(c0: usize, c1: usize, t: usize) -> Vec<Gate> {
    let tg = |q| Gate::rz(FRAC_PI_4, q);
    let tdg = |q| Gate::rz(-FRAC_PI_4, q);
    vec![
        Gate::h(t),
        Gate::cx(c1, t),
        tdg(t),
        Gate::cx(c0, t),
        tg(t),
        Gate::cx(c1, t),
        tdg(t),
        Gate::cx(c0, t),
        tg(c1),
        tg(t),
        Gate::h(t),
        Gate::cx(c0, c1),
        tg(c0),
        tdg(c1),
        Gate::cx(c0, c1),
    ]
}

/// Ancillas needed by [`mcx_vchain`] for `k` controls.
pub fn vchain_ancillas(k: usize) -> usize {
    k.saturating_sub(2)
}

/// Multi-controlled X as CNOT (`k = 1`), Toffoli (`k = 2`) or a V-chain of
/// `2k - 3` Toffolis through `k - 2` clean ancillas.
pub fn mcx_vchain(controls: &[usize], target: usize, ancillas: &[usize]) -> Result<Vec<Gate>> {
    let k = controls.len();
    if ancillas.len() < vchain_ancillas(k) {
        return Err(Error::Capacity(format!(
            "{k}-control X needs {} ancillas",
            vchain_ancillas(k)
        )));
    }
    Ok(match k {
        0 => return Err(Error::InvalidGate("mcx needs at least one control".into())),
        1 => vec![Gate::cx(controls[0], target)],
        2 => vec![Gate::ccx(controls[0], controls[1], target)],
        _ => {
            let a = &ancillas[..k - 2];
            let mut compute = vec![Gate::ccx(controls[0], controls[1], a[0])];
            for i in 1..k - 2 {
                compute.push(Gate::ccx(a[i - 1], controls[i + 1], a[i]));
            }
            let mut gates = compute.clone();
            gates.push(Gate::ccx(a[k - 3], controls[k - 1], target));
            gates.extend(compute.into_iter().rev());
            gates
        }
    })
}

/// Replaces every multi-controlled X by its V-chain, widening the circuit
/// with ancillas at `ancilla_offset` and above as needed. With
/// `expand_toffoli`, the resulting Toffolis are expanded too.
pub fn expand_mcx(circuit: &Circuit, expand_toffoli: bool) -> Result<Circuit> {
    let needed = circuit
        .gates()
        .iter()
        .filter_map(|g| match g.kind {
            GateKind::MultiControlledX(k) => Some(vchain_ancillas(k)),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let offset = circuit.ancilla_offset();
    let ancillas: Vec<usize> = (offset..offset + needed.max(circuit.num_ancillas())).collect();
    let mut out = Circuit::with_ancillas(offset, ancillas.len());
    for g in circuit.gates() {
        match g.kind {
            GateKind::MultiControlledX(_) => {
                for t in mcx_vchain(g.controls(), g.target(), &ancillas)? {
                    if expand_toffoli && t.kind == GateKind::Toffoli {
                        for b in toffoli_network(t.qubits[0], t.qubits[1], t.qubits[2]) {
                            out.push(b)?;
                        }
                    } else {
                        out.push(t)?;
                    }
                }
            }
            _ => out.push(g.clone())?,
        }
    }
    Ok(out)
}

/// Counts gates, gates on two or more qubits, and greedy earliest-layer
/// depth. Multi-controlled X gates count as one gate unless `decompose`.
pub fn tally(circuit: &Circuit, decompose: bool) -> ResourceTally {
    if decompose
        && circuit
            .gates()
            .iter()
            .any(|g| matches!(g.kind, GateKind::MultiControlledX(_)))
    {
        let expanded = expand_mcx(circuit, true).expect("ancillas are allocated by expand_mcx");
        return tally(&expanded, false);
    }
    let mut layer = vec![0usize; circuit.width()];
    let mut t = ResourceTally::default();
    for g in circuit.gates() {
        let l = g.qubits.iter().map(|&q| layer[q]).max().unwrap_or(0) + 1;
        for &q in &g.qubits {
            layer[q] = l;
        }
        t.total_gates += 1;
        t.two_qubit_gates += usize::from(g.is_multi_qubit());
        t.depth = t.depth.max(l);
    }
    t
}

/// Cost of one `k`-control X under the V-chain model, fully expanded.
pub fn mcx_cost(k: usize) -> Result<ResourceTally> {
    let mut c = Circuit::new(k + 1);
    c.push(Gate::mcx(&(0..k).collect::<Vec<_>>(), k)?)?;
    Ok(tally(&c, true))
}

/// Inputs to the total-cost model, per metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyCost {
    pub prep: ResourceTally,
    /// Oracle cost, supplied by the caller.
    pub oracle: f64,
    pub diffusion_core: ResourceTally,
    pub kappa: usize,
}

impl StrategyCost {
    /// Preparation cost of the initializer as built, diffusion core with
    /// multi-controlled X expanded.
    pub fn of(init: &Initializer, oracle: f64, kappa: usize) -> Result<Self> {
        Ok(StrategyCost {
            prep: tally(init.circuit()?, false),
            oracle,
            diffusion_core: tally(&diffusion_core(init.num_qubits())?, true),
            kappa,
        })
    }
}

/// `S + (O + D + 2S) kappa`.
pub fn resource_formula(s: f64, o: f64, d: f64, kappa: usize) -> f64 {
    s + (o + d + 2.0 * s) * kappa as f64
}

pub fn total_resource(cost: &StrategyCost, metric: Metric) -> f64 {
    resource_formula(
        cost.prep.get(metric) as f64,
        cost.oracle,
        cost.diffusion_core.get(metric) as f64,
        cost.kappa,
    )
}

/// Lower bound on `O_sigma + D` above which strategy `tau` beats `sigma`:
/// `((2 kappa_tau + 1) / (kappa_sigma - kappa_tau)) (S_tau - S_sigma) - 2 S_sigma`.
pub fn efficiency_bound(
    s_tau: f64,
    s_sigma: f64,
    kappa_tau: usize,
    kappa_sigma: usize,
) -> Result<f64> {
    if kappa_sigma <= kappa_tau {
        return Err(Error::Domain(format!(
            "no query reduction: kappa_sigma = {kappa_sigma} <= kappa_tau = {kappa_tau}"
        )));
    }
    let ratio = (2 * kappa_tau + 1) as f64 / (kappa_sigma - kappa_tau) as f64;
    Ok(ratio * (s_tau - s_sigma) - 2.0 * s_sigma)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposition {
    /// Adding a weight-one Dicke block of size `mu`.
    P1,
    /// Growing a weight-one Dicke block from `mu` to `mu + 1`.
    P2,
    /// Adding a GHZ-type parity block.
    P3,
}

/// Simplified threshold on `O + D` for weight-one Dicke blocks.
pub const P1_THRESHOLD: f64 = 67.0;
/// Simplified threshold for block growth, valid for `mu >= 3`.
pub const P2_THRESHOLD: f64 = 97.0;

impl Proposition {
    /// Minimum `|F| / |S|` the bound assumes.
    pub fn min_search_ratio(&self) -> f64 {
        match self {
            Proposition::P1 | Proposition::P3 => 64.0,
            Proposition::P2 => 100.0,
        }
    }

    /// Factor multiplying the preparation-cost increase.
    pub fn coefficient(&self, mu: usize) -> Result<f64> {
        let m = mu as f64;
        let c = match self {
            Proposition::P1 => {
                require_mu(mu)?;
                24.0 * PI / (21.0 * (2f64.powi(mu as i32) / m).sqrt() - 8.0 * PI)
            }
            Proposition::P2 => {
                require_mu(mu)?;
                120.0 * PI / (109.0 * (2.0 * m / (m + 1.0)).sqrt() - 40.0 * PI)
            }
            Proposition::P3 => 24.0 * PI / (21.0 * 2f64.sqrt() - 8.0 * PI),
        };
        Ok(c)
    }

    /// Preparation-cost increase of the reference constructions.
    pub fn reference_delta(&self, mu: usize) -> f64 {
        match self {
            Proposition::P1 => 2.0 * mu as f64,
            Proposition::P2 => 2.0,
            Proposition::P3 => 2.0 * mu as f64 + 1.0,
        }
    }

    /// Right-hand side with the reference construction costs and the
    /// `-2 S` term dropped.
    pub fn simplified_rhs(&self, mu: usize) -> Result<f64> {
        Ok(self.coefficient(mu)? * self.reference_delta(mu))
    }
}

fn require_mu(mu: usize) -> Result<()> {
    if mu < 2 {
        return Err(Error::Domain(format!("block size {mu} below 2")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropositionCheck {
    pub rhs: f64,
    pub sufficient: bool,
}

/// Evaluates `c (S_next - S_prev) - 2 S_prev` and compares `O + D`
/// against it. `search_ratio` is `|F| / |S|` of the strategy being
/// improved on.
pub fn proposition_check(
    kind: Proposition,
    mu: usize,
    s_next: f64,
    s_prev: f64,
    oracle_plus_diffusion: f64,
    search_ratio: f64,
) -> Result<PropositionCheck> {
    if search_ratio.is_nan() || search_ratio < kind.min_search_ratio() {
        return Err(Error::Domain(format!(
            "{kind:?} assumes |F|/|S| >= {}, got {search_ratio}",
            kind.min_search_ratio()
        )));
    }
    let rhs = kind.coefficient(mu)? * (s_next - s_prev) - 2.0 * s_prev;
    Ok(PropositionCheck {
        rhs,
        sufficient: oracle_plus_diffusion > rhs,
    })
}

/// Writes `strategy,metric,S,O,D,kappa,R` rows, one per metric.
pub fn write_cost_csv<W: Write>(out: W, rows: &[(String, StrategyCost)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["strategy", "metric", "S", "O", "D", "kappa", "R"])?;
    for (label, cost) in rows {
        for m in Metric::ALL {
            w.write_record([
                label.clone(),
                m.name().to_string(),
                cost.prep.get(m).to_string(),
                cost.oracle.to_string(),
                cost.diffusion_core.get(m).to_string(),
                cost.kappa.to_string(),
                total_resource(cost, m).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
