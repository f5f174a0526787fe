//! Dense statevector simulation.
//!
//! Gates are applied in place by walking amplitude pairs that differ only in
//! the target bit; no gate matrix wider than 2x2 is ever built.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::rng;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

const NORM_TOLERANCE: f64 = 1e-10;

/// Action on the target qubit of a (possibly controlled) one-qubit gate.
#[derive(Clone, Copy, Debug)]
pub(crate) enum TargetOp {
    X,
    Y,
    Z,
    H,
    Diagonal(C64, C64),
    /// Row-major `[[a, b], [c, d]]`.
    Matrix([C64; 4]),
}

impl TargetOp {
    fn ry(angle: f64) -> Self {
        let (s, c) = (angle / 2.0).sin_cos();
        TargetOp::Matrix([
            C64::new(c, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
            C64::new(c, 0.0),
        ])
    }

    fn rz(angle: f64) -> Self {
        TargetOp::Diagonal(
            C64::from_polar(1.0, -angle / 2.0),
            C64::from_polar(1.0, angle / 2.0),
        )
    }
}

/// Control mask, target index and target action for a gate.
pub(crate) fn decompose(gate: &Gate) -> (usize, usize, TargetOp) {
    let target = gate.target();
    let cmask = gate.controls().iter().fold(0usize, |m, &c| m | (1 << c));
    let op = match gate.kind {
        GateKind::Hadamard => TargetOp::H,
        GateKind::PauliX
        | GateKind::ControlledNot
        | GateKind::Toffoli
        | GateKind::MultiControlledX(_) => TargetOp::X,
        GateKind::PauliZ | GateKind::ControlledZ => TargetOp::Z,
        GateKind::PhaseRotationZ(a) => TargetOp::rz(a),
        GateKind::RotationY(a) | GateKind::ControlledRotationY(a) => TargetOp::ry(a),
    };
    (cmask, target, op)
}

/// Applies `op` to `target` on every amplitude pair whose index has all
/// `cmask` bits set.
pub(crate) fn apply_controlled(amps: &mut [C64], cmask: usize, target: usize, op: TargetOp) {
    let t = 1usize << target;
    let len = amps.len();
    debug_assert!(t < len, "target {target} outside register of {len}");
    let mut base = 0;
    while base < len {
        for i0 in base..base + t {
            if i0 & cmask != cmask {
                continue;
            }
            let i1 = i0 | t;
            let (a0, a1) = (amps[i0], amps[i1]);
            let (b0, b1) = match op {
                TargetOp::X => (a1, a0),
                TargetOp::Y => (C64::new(a1.im, -a1.re), C64::new(-a0.im, a0.re)),
                TargetOp::Z => (a0, -a1),
                TargetOp::H => {
                    let r = std::f64::consts::FRAC_1_SQRT_2;
                    ((a0 + a1) * r, (a0 - a1) * r)
                }
                TargetOp::Diagonal(d0, d1) => (a0 * d0, a1 * d1),
                TargetOp::Matrix([m00, m01, m10, m11]) => {
                    (m00 * a0 + m01 * a1, m10 * a0 + m11 * a1)
                }
            };
            amps[i0] = b0;
            amps[i1] = b1;
        }
        base += 2 * t;
    }
}

pub(crate) fn apply_gate_to(amps: &mut [C64], gate: &Gate) {
    let (cmask, target, op) = decompose(gate);
    apply_controlled(amps, cmask, target, op);
}

/// Index of the outcome selected by a uniform draw `u` against a
/// cumulative distribution.
pub(crate) fn pick_index(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("non-empty distribution");
    let x = u * total;
    cdf.partition_point(|&c| c <= x).min(cdf.len() - 1)
}

/// Renders `index` as `q0 q1 ... q(n-1)` left to right.
pub fn bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Inverse of [`bitstring`].
pub fn parse_bitstring(s: &str) -> Option<usize> {
    s.chars()
        .enumerate()
        .try_fold(0usize, |acc, (q, ch)| match ch {
            '0' => Some(acc),
            '1' => Some(acc | 1 << q),
            _ => None,
        })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n` qubits.
    pub fn new_zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "{n} qubits (supported: 1..={MAX_QUBITS})"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n];
        amplitudes[0] = C64::new(1.0, 0.0);
        Ok(StateVector {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Wraps a normalized amplitude vector whose length is a power of two.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Domain(format!(
                "amplitude vector length {len} is not 2^n with n >= 1"
            )));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "{n} qubits (supported: 1..={MAX_QUBITS})"
            )));
        }
        let s = StateVector {
            num_qubits: n,
            amplitudes,
        };
        if (s.norm_sqr() - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain(format!(
                "state is not normalized (norm^2 = {})",
                s.norm_sqr()
            )));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                width: self.num_qubits,
            });
        }
        apply_gate_to(&mut self.amplitudes, gate);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.width() != self.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                actual: circuit.width(),
            });
        }
        for g in circuit.gates() {
            apply_gate_to(&mut self.amplitudes, g);
        }
        Ok(())
    }

    /// Total probability of the basis states accepted by `predicate`.
    pub fn probability_of(&self, predicate: impl Fn(usize) -> bool) -> f64 {
        let p: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| predicate(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        p.clamp(0.0, 1.0)
    }

    pub fn cumulative(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.norm_sqr();
                Some(*acc)
            })
            .collect()
    }

    /// Measured basis indices, one per shot. Shot `i` uses its own stream
    /// of `seed`.
    pub fn sample_indices(&self, shots: usize, seed: u64) -> Result<Vec<usize>> {
        if shots == 0 {
            return Err(Error::Domain("shots must be at least 1".into()));
        }
        let cdf = self.cumulative();
        Ok((0..shots)
            .map(|s| pick_index(&cdf, rng::shot_uniform(seed, s)))
            .collect())
    }

    /// Histogram of measured bitstrings (q1..qn left to right).
    pub fn sample(&self, shots: usize, seed: u64) -> Result<BTreeMap<String, usize>> {
        let mut hist = BTreeMap::new();
        for i in self.sample_indices(shots, seed)? {
            *hist.entry(bitstring(i, self.num_qubits)).or_insert(0) += 1;
        }
        Ok(hist)
    }
}
