//! Pauli-trajectory execution of a [`NoisyProgram`].
//!
//! The register is the full data-plus-ancilla vector, split into slices of
//! `2^n` amplitudes, one per ancilla configuration. Only occupied slices are
//! touched by data-only gates, so a trajectory whose ancillas stay clean
//! costs about as much as an `n`-qubit simulation.

use num_complex::Complex64 as C64;
use rand::Rng;

use super::transpile::{Segment, TranspiledCircuit};
use super::{NoiseModel, NoisyProgram, Stage};
use crate::circuit::Gate;
use crate::grover::OraclePredicate;
use crate::simulator::{apply_controlled, apply_gate_to, pick_index, TargetOp};

/// Slices whose total weight falls below this are cleared.
const EMPTY_SLICE: f64 = 1e-24;

pub(crate) struct Register {
    n: usize,
    amps: Vec<C64>,
    occupied: Vec<bool>,
}

impl Register {
    pub(crate) fn new(n: usize, width: usize) -> Self {
        Register {
            n,
            amps: vec![C64::new(0.0, 0.0); 1 << width],
            occupied: vec![false; 1 << (width - n)],
        }
    }

    fn slice_len(&self) -> usize {
        1 << self.n
    }

    pub(crate) fn load(&mut self, data: &[C64]) {
        let d = self.slice_len();
        for s in 0..self.occupied.len() {
            if self.occupied[s] {
                self.amps[s * d..(s + 1) * d].fill(C64::new(0.0, 0.0));
                self.occupied[s] = false;
            }
        }
        self.amps[..d].copy_from_slice(data);
        self.occupied[0] = true;
    }

    pub(crate) fn data(&self) -> &[C64] {
        &self.amps[..self.slice_len()]
    }

    fn only_clean(&self) -> bool {
        self.occupied.iter().skip(1).all(|o| !o)
    }

    fn for_each_slice(&mut self, mut f: impl FnMut(&mut [C64])) {
        let d = self.slice_len();
        for (s, chunk) in self.amps.chunks_mut(d).enumerate() {
            if self.occupied[s] {
                f(chunk);
            }
        }
    }

    fn refresh(&mut self) {
        let d = self.slice_len();
        for (s, chunk) in self.amps.chunks_mut(d).enumerate() {
            let w: f64 = chunk.iter().map(|a| a.norm_sqr()).sum();
            self.occupied[s] = w > EMPTY_SLICE;
            if !self.occupied[s] && w > 0.0 {
                chunk.fill(C64::new(0.0, 0.0));
            }
        }
    }

    fn touches_ancilla(&self, g: &Gate) -> bool {
        g.qubits.iter().any(|&q| q >= self.n)
    }

    /// Applies `g`; gates on ancillas go through the full vector and mark
    /// every slice live until the next [`Register::refresh`].
    fn apply(&mut self, g: &Gate) {
        if self.touches_ancilla(g) {
            apply_gate_to(&mut self.amps, g);
            self.occupied.fill(true);
        } else {
            self.for_each_slice(|chunk| apply_gate_to(chunk, g));
        }
    }

    fn pauli(&mut self, q: usize, code: u8) {
        let op = match code {
            1 => TargetOp::X,
            2 => TargetOp::Y,
            3 => TargetOp::Z,
            _ => return,
        };
        if q >= self.n {
            apply_controlled(&mut self.amps, 0, q, op);
            self.occupied.fill(true);
        } else {
            self.for_each_slice(|chunk| apply_controlled(chunk, 0, q, op));
        }
    }

    /// An error-free V-chain: compute, flip, uncompute. It preserves the
    /// ancilla configuration, so each slice is permuted in place.
    fn vchain(&mut self, toffolis: &[Gate], scratch: &mut Vec<C64>) {
        let d = self.slice_len();
        let mask = d - 1;
        for s in 0..self.occupied.len() {
            if !self.occupied[s] {
                continue;
            }
            let chunk = &mut self.amps[s * d..(s + 1) * d];
            scratch.clear();
            scratch.resize(d, C64::new(0.0, 0.0));
            for (x, &a) in chunk.iter().enumerate() {
                let mut i = x | s << self.n;
                for t in toffolis {
                    let q = &t.qubits;
                    if i >> q[0] & 1 == 1 && i >> q[1] & 1 == 1 {
                        i ^= 1 << q[2];
                    }
                }
                debug_assert_eq!(i >> self.n, s);
                scratch[i & mask] = a;
            }
            chunk.copy_from_slice(scratch);
        }
    }

    fn oracle(&mut self, f: &OraclePredicate) {
        self.for_each_slice(|chunk| {
            for (x, a) in chunk.iter_mut().enumerate() {
                if f.accepts(x) {
                    *a = -*a;
                }
            }
        });
    }

    /// Cumulative distribution of the data register, ancillas traced out.
    pub(crate) fn data_cdf(&self) -> Vec<f64> {
        let d = self.slice_len();
        let mut p = vec![0.0; d];
        for (s, chunk) in self.amps.chunks(d).enumerate() {
            if self.occupied[s] {
                for (pi, a) in p.iter_mut().zip(chunk) {
                    *pi += a.norm_sqr();
                }
            }
        }
        let mut acc = 0.0;
        for pi in p.iter_mut() {
            acc += *pi;
            *pi = acc;
        }
        p
    }

    /// Error-free source gate.
    pub(crate) fn apply_segment_ideal(&mut self, seg: &Segment, scratch: &mut Vec<C64>) {
        if !seg.macros.is_empty() {
            let toffolis: Vec<Gate> = seg.macros.iter().map(|m| m.gate.clone()).collect();
            self.vchain(&toffolis, scratch);
        } else if seg.touches_ancillas || self.touches_ancilla(&seg.source) {
            self.apply(&seg.source);
            self.refresh();
        } else {
            let g = &seg.source;
            self.for_each_slice(|chunk| apply_gate_to(chunk, g));
        }
    }

    /// Replays `seg` with errors; `errors` holds positions relative to the
    /// circuit's base list.
    fn apply_segment_noisy(
        &mut self,
        tc: &TranspiledCircuit,
        seg: &Segment,
        errors: &[ErrorEvent],
        offset: usize,
    ) {
        let base = tc.base_gates();
        let replay = |reg: &mut Register, range: std::ops::Range<usize>| {
            for j in range {
                let g = &base[j];
                reg.apply(g);
                for e in errors.iter().filter(|e| e.pos == offset + j) {
                    let (first, second) = (e.code >> 2, e.code & 3);
                    if g.qubits.len() == 1 {
                        reg.pauli(g.qubits[0], e.code);
                    } else {
                        reg.pauli(g.qubits[0], first);
                        reg.pauli(g.qubits[1], second);
                    }
                }
            }
        };
        if seg.macros.is_empty() {
            replay(self, seg.base.clone());
        } else {
            for m in &seg.macros {
                let hit = errors.iter().any(|e| m.base.contains(&(e.pos - offset)));
                if hit {
                    replay(self, m.base.clone());
                } else {
                    self.apply(&m.gate);
                }
            }
        }
        if seg.touches_ancillas {
            self.refresh();
        }
    }
}

/// A Pauli inserted after base gate `pos` (global position). For one-qubit
/// gates `code` is 1, 2 or 3 for X, Y, Z; for two-qubit gates it packs the
/// Paulis on the first and second qubit as `4 * a + b`, never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ErrorEvent {
    pub pos: usize,
    pub code: u8,
}

/// Ideal quantities shared by all shots of a program.
pub(crate) struct Prepared {
    /// Global base position where each stage starts.
    offsets: Vec<usize>,
    /// Ideal data state at the start of each stage.
    checkpoints: Vec<Vec<C64>>,
    /// Ideal measurement distribution at each boundary.
    pub(crate) boundary_cdfs: Vec<Vec<f64>>,
    one_qubit: Vec<usize>,
    two_qubit: Vec<usize>,
}

impl Prepared {
    pub(crate) fn new(program: &NoisyProgram) -> Self {
        let mut offsets = Vec::new();
        let mut one_qubit = Vec::new();
        let mut two_qubit = Vec::new();
        let mut pos = 0;
        for st in &program.stages {
            offsets.push(pos);
            if let Stage::Gates(tc) = st {
                for g in tc.base_gates() {
                    if g.qubits.len() == 1 {
                        one_qubit.push(pos);
                    } else {
                        two_qubit.push(pos);
                    }
                    pos += 1;
                }
            }
        }
        offsets.push(pos);

        let mut reg = Register::new(program.n, program.width);
        let mut scratch = Vec::new();
        let mut start = vec![C64::new(0.0, 0.0); 1 << program.n];
        start[0] = C64::new(1.0, 0.0);
        reg.load(&start);
        let mut checkpoints = Vec::with_capacity(program.stages.len() + 1);
        let mut boundary_cdfs = Vec::new();
        for (i, st) in program.stages.iter().enumerate() {
            checkpoints.push(reg.data().to_vec());
            match st {
                Stage::Gates(tc) => {
                    for seg in tc.segments() {
                        reg.apply_segment_ideal(seg, &mut scratch);
                    }
                }
                Stage::Oracle(f) => reg.oracle(f),
            }
            debug_assert!(reg.only_clean());
            if program.measure_after.contains(&i) {
                boundary_cdfs.push(reg.data_cdf());
            }
        }
        checkpoints.push(reg.data().to_vec());
        Prepared {
            offsets,
            checkpoints,
            boundary_cdfs,
            one_qubit,
            two_qubit,
        }
    }

    fn stage_of(&self, pos: usize) -> usize {
        self.offsets.partition_point(|&o| o <= pos) - 1
    }

    /// Error events of one shot, sorted by position. Each gate class draws
    /// from its own generator, so a program that is a prefix of another
    /// sees the same events on the shared gates.
    pub(crate) fn sample_errors(
        &self,
        noise: &NoiseModel,
        rng1: &mut impl Rng,
        rng2: &mut impl Rng,
    ) -> Vec<ErrorEvent> {
        let mut out = Vec::new();
        scatter(&self.one_qubit, noise.p1, rng1, |pos, rng| {
            out.push(ErrorEvent {
                pos,
                code: rng.gen_range(1..=3),
            })
        });
        scatter(&self.two_qubit, noise.p2, rng2, |pos, rng| {
            out.push(ErrorEvent {
                pos,
                code: rng.gen_range(1..=15),
            })
        });
        out.sort_by_key(|e| e.pos);
        out
    }

    /// Solution flags at every boundary for a shot with the given errors.
    /// `draw(b)` is the measurement uniform for boundary `b`.
    pub(crate) fn run_shot(
        &self,
        program: &NoisyProgram,
        errors: &[ErrorEvent],
        reg: &mut Register,
        scratch: &mut Vec<C64>,
        draw: impl Fn(usize) -> f64,
    ) -> Vec<bool> {
        let sample = |cdf: &[f64], b: usize| program.predicate.accepts(pick_index(cdf, draw(b)));
        let first_stage = errors
            .first()
            .map(|e| self.stage_of(e.pos))
            .unwrap_or(program.stages.len());
        let mut flags = Vec::with_capacity(program.measure_after.len());
        let mut b = 0;
        while b < program.measure_after.len() && program.measure_after[b] < first_stage {
            flags.push(sample(&self.boundary_cdfs[b], b));
            b += 1;
        }
        if b == program.measure_after.len() {
            return flags;
        }
        reg.load(&self.checkpoints[first_stage]);
        let mut cursor = 0;
        for (i, st) in program.stages.iter().enumerate().skip(first_stage) {
            match st {
                Stage::Gates(tc) => {
                    let offset = self.offsets[i];
                    for seg in tc.segments() {
                        let end = offset + seg.base.end;
                        let from = cursor;
                        while cursor < errors.len() && errors[cursor].pos < end {
                            cursor += 1;
                        }
                        if from == cursor {
                            reg.apply_segment_ideal(seg, scratch);
                        } else {
                            reg.apply_segment_noisy(tc, seg, &errors[from..cursor], offset);
                        }
                    }
                }
                Stage::Oracle(f) => reg.oracle(f),
            }
            if b < program.measure_after.len() && program.measure_after[b] == i {
                flags.push(sample(&reg.data_cdf(), b));
                b += 1;
            }
        }
        flags
    }
}

/// Calls `hit` for each position selected independently with probability
/// `p`, skipping ahead geometrically.
fn scatter<R: Rng>(positions: &[usize], p: f64, rng: &mut R, mut hit: impl FnMut(usize, &mut R)) {
    if p <= 0.0 || positions.is_empty() {
        return;
    }
    if p >= 1.0 {
        for &pos in positions {
            hit(pos, rng);
        }
        return;
    }
    let log_q = (-p).ln_1p();
    let mut i = 0usize;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>();
        let skip = (u.ln() / log_q).floor();
        if skip >= (positions.len() - i) as f64 {
            return;
        }
        i += skip as usize;
        hit(positions[i], rng);
        i += 1;
        if i >= positions.len() {
            return;
        }
    }
}
