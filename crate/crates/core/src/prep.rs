//! Initial-state preparation: Dicke, relaxed-Dicke and GHZ-type blocks
//! combined into a product-form initializer.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::circuit::{Circuit, Gate};
use crate::constraints::{binomial, BlockKind, Selection};
use crate::error::{Error, Result};
use crate::simulator::{StateVector, MAX_QUBITS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreparedStateKind {
    /// Uniform over weight-one strings.
    Dicke1(usize),
    /// Uniform over strings of weight zero or one.
    Dicke11(usize),
    /// Uniform over strings with Hamming-weight parity `nu`.
    GhzX(usize, u8),
    /// Uniform over strings of weight `nu`.
    DickeGeneral(usize, usize),
    /// Uniform over weights `max(0, b - r) ..= min(b, mu)`.
    RelaxedDicke(usize, usize, usize),
    /// Hadamard on every qubit.
    HadamardPad(usize),
}

impl PreparedStateKind {
    pub fn size(&self) -> usize {
        match *self {
            PreparedStateKind::Dicke1(m)
            | PreparedStateKind::Dicke11(m)
            | PreparedStateKind::GhzX(m, _)
            | PreparedStateKind::DickeGeneral(m, _)
            | PreparedStateKind::RelaxedDicke(m, _, _)
            | PreparedStateKind::HadamardPad(m) => m,
        }
    }

    fn weight_window(&self) -> Option<(usize, usize)> {
        match *self {
            PreparedStateKind::Dicke1(_) => Some((1, 1)),
            PreparedStateKind::Dicke11(_) => Some((0, 1)),
            PreparedStateKind::DickeGeneral(_, nu) => Some((nu, nu)),
            PreparedStateKind::RelaxedDicke(m, b, r) => Some((b.saturating_sub(r), b.min(m))),
            PreparedStateKind::HadamardPad(m) => Some((0, m)),
            PreparedStateKind::GhzX(..) => None,
        }
    }

    /// Whether bitstring `x` (over the block's qubits) is in the support.
    pub fn accepts(&self, x: usize) -> bool {
        let w = x.count_ones() as usize;
        match (self, self.weight_window()) {
            (PreparedStateKind::GhzX(_, nu), _) => w % 2 == *nu as usize,
            (_, Some((lo, hi))) => lo <= w && w <= hi,
            _ => unreachable!(),
        }
    }

    /// Number of strings in the support.
    pub fn support_size(&self) -> BigUint {
        match (self, self.weight_window()) {
            (PreparedStateKind::GhzX(m, _), _) => BigUint::from(1u8) << (m - 1),
            (_, Some((lo, hi))) => (lo..=hi).map(|w| binomial(self.size(), w)).sum(),
            _ => unreachable!(),
        }
    }

    /// Gate-level construction, when one is available.
    pub fn circuit(&self) -> Option<Circuit> {
        let m = self.size();
        match *self {
            PreparedStateKind::Dicke1(_) => dicke1_circuit(m).ok(),
            PreparedStateKind::Dicke11(_) => dicke11_circuit(m).ok(),
            PreparedStateKind::GhzX(_, nu) => ghz_x_circuit(m, nu).ok(),
            PreparedStateKind::HadamardPad(_) => Circuit::from_gates(m, (0..m).map(Gate::h)).ok(),
            _ => match self.weight_window()? {
                (0, 0) => Some(Circuit::new(m)),
                (lo, hi) if lo == m && hi == m => Circuit::from_gates(m, (0..m).map(Gate::x)).ok(),
                (1, 1) => dicke1_circuit(m).ok(),
                (0, 1) => dicke11_circuit(m).ok(),
                (0, hi) if hi == m => Circuit::from_gates(m, (0..m).map(Gate::h)).ok(),
                _ => None,
            },
        }
    }

    pub fn amplitudes(&self) -> Result<Vec<f64>> {
        match *self {
            PreparedStateKind::GhzX(m, nu) => {
                check_block_size(m)?;
                let a = (1.0 / (1u64 << (m - 1)) as f64).sqrt();
                Ok((0..1usize << m)
                    .map(|x| {
                        if x.count_ones() % 2 == nu as u32 {
                            a
                        } else {
                            0.0
                        }
                    })
                    .collect())
            }
            _ => {
                let (lo, hi) = self.weight_window().expect("windowed kind");
                window_amplitudes(self.size(), lo, hi)
            }
        }
    }
}

fn check_block_size(mu: usize) -> Result<()> {
    if mu == 0 {
        return Err(Error::Domain("block size must be at least 1".into()));
    }
    if mu > MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "block of {mu} qubits exceeds the {MAX_QUBITS}-qubit cap"
        )));
    }
    Ok(())
}

/// `theta` with `cos(theta / 2) = 1 / sqrt(m)`.
fn split_angle(m: usize) -> f64 {
    2.0 * (1.0 / (m as f64).sqrt()).acos()
}

fn weight_one_cascade(c: &mut Circuit, mu: usize) {
    for i in 1..mu {
        c.push(Gate::cry(split_angle(mu - i + 1), i - 1, i))
            .expect("in range");
        c.push(Gate::cx(i, i - 1)).expect("in range");
    }
}

/// Uniform superposition over the weight-one strings of `mu` qubits.
pub fn dicke1_circuit(mu: usize) -> Result<Circuit> {
    check_block_size(mu)?;
    let mut c = Circuit::new(mu);
    c.push(Gate::x(0))?;
    weight_one_cascade(&mut c, mu);
    Ok(c)
}

/// Uniform superposition over the strings of weight at most one.
pub fn dicke11_circuit(mu: usize) -> Result<Circuit> {
    check_block_size(mu)?;
    let mut c = Circuit::new(mu);
    c.push(Gate::ry(split_angle(mu + 1), 0))?;
    weight_one_cascade(&mut c, mu);
    Ok(c)
}

/// Uniform superposition over the strings with weight parity `nu`: a GHZ
/// state rotated into the X basis, with one flipped bit for odd parity.
pub fn ghz_x_circuit(mu: usize, nu: u8) -> Result<Circuit> {
    check_block_size(mu)?;
    if nu > 1 {
        return Err(Error::Domain(format!("parity {nu} is not a bit")));
    }
    let mut c = Circuit::new(mu);
    match (mu, nu) {
        (1, 0) => {}
        (1, _) => c.push(Gate::x(0))?,
        (2, 1) => {
            c.push(Gate::h(0))?;
            c.push(Gate::x(1))?;
            c.push(Gate::cx(0, 1))?;
        }
        _ => {
            c.push(Gate::h(0))?;
            for i in 1..mu {
                c.push(Gate::cx(i - 1, i))?;
            }
            for q in 0..mu {
                c.push(Gate::h(q))?;
                if q == 0 && nu == 1 {
                    c.push(Gate::x(0))?;
                }
            }
        }
    }
    Ok(c)
}

fn window_amplitudes(mu: usize, lo: usize, hi: usize) -> Result<Vec<f64>> {
    check_block_size(mu)?;
    let hi = hi.min(mu);
    if lo > hi {
        return Err(Error::Infeasible(format!(
            "no weight in {lo}..={hi} on {mu} qubits"
        )));
    }
    let count = (lo..=hi)
        .map(|w| binomial(mu, w))
        .sum::<BigUint>()
        .to_f64()
        .expect("block fits in f64");
    let a = 1.0 / count.sqrt();
    Ok((0..1usize << mu)
        .map(|x| {
            let w = x.count_ones() as usize;
            if lo <= w && w <= hi {
                a
            } else {
                0.0
            }
        })
        .collect())
}

/// Real amplitudes of the weight-`nu` Dicke state on `mu` qubits.
pub fn dicke_amplitudes(mu: usize, nu: usize) -> Result<Vec<f64>> {
    if nu > mu {
        return Err(Error::Infeasible(format!("weight {nu} on {mu} qubits")));
    }
    window_amplitudes(mu, nu, nu)
}

/// Uniform amplitudes over weights `max(0, b - r) ..= min(b, mu)`.
pub fn relaxed_dicke_amplitudes(mu: usize, b: usize, r: usize) -> Result<Vec<f64>> {
    window_amplitudes(mu, b.saturating_sub(r), b.min(mu))
}

/// One prepared block on a set of original variable indices (ascending).
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub kind: PreparedStateKind,
    pub qubits: Vec<usize>,
}

impl Block {
    fn local_index(&self, x: usize) -> usize {
        self.qubits
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &q)| acc | ((x >> q & 1) << k))
    }
}

/// Product-form initializer. Gates act on the original variable indices;
/// `permutation` records the block-contiguous layout (entry `i` is the
/// position of variable `i`) for reporting and for [`Circuit::relabel`].
#[derive(Clone, Debug)]
pub struct Initializer {
    n: usize,
    blocks: Vec<Block>,
    circuit: Circuit,
    injected: Vec<usize>,
    permutation: Vec<usize>,
}

pub fn build_initializer(selection: &Selection, n: usize) -> Result<Initializer> {
    selection.validate(n)?;
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::Capacity(format!(
            "{n} qubits outside 1..={MAX_QUBITS}"
        )));
    }
    let mut blocks = Vec::new();
    for s in &selection.disjoint_sets {
        let mu = s.members.len();
        let kind = match s.kind {
            BlockKind::Dicke { weight: 1 } => PreparedStateKind::Dicke1(mu),
            BlockKind::Dicke { weight } => PreparedStateKind::DickeGeneral(mu, weight),
            BlockKind::Ghz { parity } => PreparedStateKind::GhzX(mu, parity),
        };
        blocks.push(Block {
            kind,
            qubits: s.members.iter().copied().collect(),
        });
    }
    for r in &selection.reduced_sets {
        let mu = r.members.len();
        let kind = match r.weight_window() {
            (0, 1) => PreparedStateKind::Dicke11(mu),
            _ => PreparedStateKind::RelaxedDicke(mu, r.target, r.overlap),
        };
        blocks.push(Block {
            kind,
            qubits: r.members.iter().copied().collect(),
        });
    }
    let used = selection.used();
    let free: Vec<usize> = (0..n).filter(|q| !used.contains(q)).collect();
    if !free.is_empty() {
        blocks.push(Block {
            kind: PreparedStateKind::HadamardPad(free.len()),
            qubits: free,
        });
    }

    let mut circuit = Circuit::new(n);
    let mut injected = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        match b.kind.circuit() {
            Some(local) => circuit.extend(&local.embed(&b.qubits, n)?)?,
            None => injected.push(i),
        }
    }
    Ok(Initializer {
        n,
        blocks,
        circuit,
        injected,
        permutation: selection.permutation(n),
    })
}

impl Initializer {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// True when every block has a gate-level construction.
    pub fn is_circuit(&self) -> bool {
        self.injected.is_empty()
    }

    pub fn injected_blocks(&self) -> impl Iterator<Item = &Block> {
        self.injected.iter().map(|&i| &self.blocks[i])
    }

    /// The full initializer circuit; fails if any block needs amplitude
    /// injection.
    pub fn circuit(&self) -> Result<&Circuit> {
        if let Some(b) = self.injected_blocks().next() {
            return Err(Error::Unsupported(format!(
                "{:?} has no circuit construction",
                b.kind
            )));
        }
        Ok(&self.circuit)
    }

    /// Gates for the circuit-realizable blocks only.
    pub fn partial_circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Whether `x` lies in the search space.
    pub fn contains(&self, x: usize) -> bool {
        self.blocks.iter().all(|b| b.kind.accepts(b.local_index(x)))
    }

    pub fn search_space_size(&self) -> BigUint {
        self.blocks.iter().map(|b| b.kind.support_size()).product()
    }

    /// The initial state: circuit blocks simulated, the rest injected.
    pub fn prepare(&self) -> Result<StateVector> {
        let mut state = StateVector::new_zero(self.n)?;
        state.apply_circuit(&self.circuit)?;
        if self.injected.is_empty() {
            return Ok(state);
        }
        let mut amps = state.amplitudes().to_vec();
        for b in self.injected_blocks() {
            let local = b.kind.amplitudes()?;
            let mask = b.qubits.iter().fold(0usize, |m, &q| m | 1 << q);
            let before = amps.clone();
            for (x, a) in amps.iter_mut().enumerate() {
                *a = before[x & !mask] * local[b.local_index(x)];
            }
        }
        StateVector::from_amplitudes(amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{
        preprocess_cardinality, CardinalityConstraint, DisjointSet, ReducedSet,
    };
    use num_complex::Complex64;
    use std::collections::BTreeSet;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn run(c: &Circuit) -> StateVector {
        let mut s = StateVector::new_zero(c.width()).unwrap();
        s.apply_circuit(c).unwrap();
        s
    }

    /// Support is exactly `accept`, all amplitudes equal and real-positive
    /// up to a common phase.
    fn assert_uniform_on(amps: &[Complex64], accept: impl Fn(usize) -> bool) {
        let support: Vec<usize> = (0..amps.len()).filter(|&x| accept(x)).collect();
        let expected = 1.0 / (support.len() as f64).sqrt();
        let phase = amps[support[0]] / amps[support[0]].norm();
        for (x, a) in amps.iter().enumerate() {
            let want = if accept(x) { expected } else { 0.0 };
            assert!(
                (a - phase * want).norm() < 1e-10,
                "x={x:b} a={a} want {want}"
            );
        }
    }

    #[test]
    fn dicke1_small_cases() {
        let c = dicke1_circuit(1).unwrap();
        assert_eq!(c.gates(), &[Gate::x(0)]);
        // 4x4 matrix product oracle for mu = 2: X on q0, CRY(pi/2) q0->q1, CX q1->q0.
        let h = FRAC_1_SQRT_2;
        let mut v = [0.0, 1.0, 0.0, 0.0];
        // CRY(pi/2) with control bit 0, target bit 1 acts on indices 1 and 3.
        let (a, b) = (v[1], v[3]);
        v[1] = h * a - h * b;
        v[3] = h * a + h * b;
        // CX control bit 1, target bit 0 swaps indices 2 and 3.
        v.swap(2, 3);
        let s = run(&dicke1_circuit(2).unwrap());
        for (x, want) in v.iter().enumerate() {
            assert!((s.amplitude(x).re - want).abs() < 1e-12 && s.amplitude(x).im.abs() < 1e-12);
        }
        assert!((s.amplitude(1).re - h).abs() < 1e-12 && (s.amplitude(2).re - h).abs() < 1e-12);
    }

    #[test]
    fn builders_have_exact_support_and_uniform_amplitudes() {
        for mu in 1..=12 {
            let s = run(&dicke1_circuit(mu).unwrap());
            assert_uniform_on(s.amplitudes(), |x| x.count_ones() == 1);
            let s = run(&dicke11_circuit(mu).unwrap());
            assert_uniform_on(s.amplitudes(), |x| x.count_ones() <= 1);
            for nu in 0..2u32 {
                let s = run(&ghz_x_circuit(mu, nu as u8).unwrap());
                if mu == 1 {
                    assert_uniform_on(s.amplitudes(), |x| x as u32 == nu);
                } else {
                    assert_uniform_on(s.amplitudes(), |x| x.count_ones() % 2 == nu);
                }
            }
        }
    }

    #[test]
    fn amplitude_builders() {
        assert_eq!(dicke_amplitudes(2, 0).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let d = dicke_amplitudes(4, 2).unwrap();
        let nz: Vec<usize> = (0..16).filter(|&x| d[x] != 0.0).collect();
        assert_eq!(nz, vec![3, 5, 6, 9, 10, 12]);
        assert!(nz.iter().all(|&x| (d[x] - 1.0 / 6f64.sqrt()).abs() < 1e-15));
        let r = relaxed_dicke_amplitudes(3, 1, 1).unwrap();
        assert_eq!(r, vec![0.5, 0.5, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0]);
        assert_eq!(
            relaxed_dicke_amplitudes(2, 1, 0).unwrap(),
            dicke_amplitudes(2, 1).unwrap()
        );
        let r = relaxed_dicke_amplitudes(3, 2, 1).unwrap();
        assert_eq!(r.iter().filter(|&&a| a != 0.0).count(), 6);
        assert!(dicke_amplitudes(2, 3).is_err());
        for mu in 1..=12 {
            for nu in 0..=mu {
                let a = dicke_amplitudes(mu, nu).unwrap();
                let c: Vec<Complex64> = a.iter().map(|&v| Complex64::new(v, 0.0)).collect();
                assert_uniform_on(&c, |x| x.count_ones() as usize == nu);
            }
        }
    }

    fn exact_cover() -> Vec<CardinalityConstraint> {
        [
            vec![1, 2, 3, 4],
            vec![3, 7, 8],
            vec![2, 5, 10],
            vec![5, 6, 7],
            vec![1, 3, 7, 10],
            vec![2, 6, 9],
            vec![4, 8, 9, 10],
        ]
        .into_iter()
        .map(|m| CardinalityConstraint::new(m.into_iter().map(|i: usize| i - 1), 1).unwrap())
        .collect()
    }

    #[test]
    fn sample_initializers_are_uniform_over_their_search_space() {
        let cs = exact_cover();
        for (eta, size) in [(0, 96usize), (1, 48)] {
            let sel = preprocess_cardinality(&cs, eta).unwrap();
            let init = build_initializer(&sel, 10).unwrap();
            assert!(init.is_circuit());
            let s = init.prepare().unwrap();
            // Membership oracle straight from the selected constraints.
            let member = |x: usize| {
                sel.disjoint_sets
                    .iter()
                    .all(|d| d.members.iter().filter(|&&i| x >> i & 1 == 1).count() == 1)
                    && sel
                        .reduced_sets
                        .iter()
                        .all(|r| r.members.iter().filter(|&&i| x >> i & 1 == 1).count() <= 1)
            };
            assert_eq!((0..1024).filter(|&x| member(x)).count(), size);
            assert_uniform_on(s.amplitudes(), member);
            assert_eq!(init.search_space_size(), num_bigint::BigUint::from(size));
        }
    }

    #[test]
    fn empty_selection_is_hadamard_padding() {
        let init = build_initializer(&Selection::empty(), 3).unwrap();
        assert_eq!(
            init.circuit().unwrap().gates(),
            &[Gate::h(0), Gate::h(1), Gate::h(2)]
        );
    }

    #[test]
    fn general_blocks_are_injected() {
        let sel = Selection {
            disjoint_sets: vec![DisjointSet {
                members: BTreeSet::from([0, 2, 3, 5]),
                kind: BlockKind::Dicke { weight: 2 },
                source: 0,
            }],
            reduced_sets: vec![ReducedSet {
                members: BTreeSet::from([1, 4, 6]),
                target: 2,
                overlap: 1,
                source: 1,
            }],
            threshold: 1,
        };
        let init = build_initializer(&sel, 8).unwrap();
        assert!(matches!(init.circuit(), Err(Error::Unsupported(_))));
        let s = init.prepare().unwrap();
        let w = |x: usize, qs: &[usize]| qs.iter().filter(|&&q| x >> q & 1 == 1).count();
        assert_uniform_on(s.amplitudes(), |x| {
            w(x, &[0, 2, 3, 5]) == 2 && (1..=2).contains(&w(x, &[1, 4, 6]))
        });
        assert_eq!(
            init.search_space_size(),
            num_bigint::BigUint::from(6u32 * 6 * 2)
        );
    }

    #[test]
    fn rejects_empty_blocks() {
        assert!(dicke1_circuit(0).is_err());
        assert!(dicke11_circuit(0).is_err());
        assert!(ghz_x_circuit(0, 0).is_err());
    }
}
