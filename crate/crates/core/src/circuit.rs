//! Gates and circuits over a fixed gate set.
//!
//! Qubit `q` of a circuit is bit `q` of a statevector index. Multi-qubit
//! gates list their controls first and their target last.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    Hadamard,
    PauliX,
    PauliZ,
    /// `exp(-i angle Z / 2)`.
    PhaseRotationZ(f64),
    /// `exp(-i angle Y / 2)`.
    RotationY(f64),
    ControlledNot,
    ControlledZ,
    ControlledRotationY(f64),
    Toffoli,
    /// X on the target when all `controls` qubits are set.
    MultiControlledX(usize),
}

impl GateKind {
    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Hadamard
            | GateKind::PauliX
            | GateKind::PauliZ
            | GateKind::PhaseRotationZ(_)
            | GateKind::RotationY(_) => 1,
            GateKind::ControlledNot | GateKind::ControlledZ | GateKind::ControlledRotationY(_) => 2,
            GateKind::Toffoli => 3,
            GateKind::MultiControlledX(k) => k + 1,
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::PhaseRotationZ(a)
            | GateKind::RotationY(a)
            | GateKind::ControlledRotationY(a) => Some(a),
            _ => None,
        }
    }

    pub fn inverse(&self) -> GateKind {
        match *self {
            GateKind::PhaseRotationZ(a) => GateKind::PhaseRotationZ(-a),
            GateKind::RotationY(a) => GateKind::RotationY(-a),
            GateKind::ControlledRotationY(a) => GateKind::ControlledRotationY(-a),
            other => other,
        }
    }

    /// True for gates that map basis states to basis states without phases.
    pub fn is_permutation(&self) -> bool {
        matches!(
            self,
            GateKind::PauliX
                | GateKind::ControlledNot
                | GateKind::Toffoli
                | GateKind::MultiControlledX(_)
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Hadamard => "h",
            GateKind::PauliX => "x",
            GateKind::PauliZ => "z",
            GateKind::PhaseRotationZ(_) => "rz",
            GateKind::RotationY(_) => "ry",
            GateKind::ControlledNot => "cx",
            GateKind::ControlledZ => "cz",
            GateKind::ControlledRotationY(_) => "cry",
            GateKind::Toffoli => "ccx",
            GateKind::MultiControlledX(_) => "mcx",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} expects {} qubits, got {}",
                kind.name(),
                kind.arity(),
                qubits.len()
            )));
        }
        if let GateKind::MultiControlledX(0) = kind {
            return Err(Error::InvalidGate("mcx needs at least one control".into()));
        }
        if let Some(a) = kind.angle() {
            if !a.is_finite() {
                return Err(Error::InvalidGate(format!(
                    "{} angle {a} is not finite",
                    kind.name()
                )));
            }
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::InvalidGate(format!(
                    "{} repeats qubit {q}",
                    kind.name()
                )));
            }
        }
        Ok(Gate { kind, qubits })
    }

    pub fn h(q: usize) -> Self {
        Gate {
            kind: GateKind::Hadamard,
            qubits: vec![q],
        }
    }

    pub fn x(q: usize) -> Self {
        Gate {
            kind: GateKind::PauliX,
            qubits: vec![q],
        }
    }

    pub fn z(q: usize) -> Self {
        Gate {
            kind: GateKind::PauliZ,
            qubits: vec![q],
        }
    }

    pub fn rz(angle: f64, q: usize) -> Self {
        Gate {
            kind: GateKind::PhaseRotationZ(angle),
            qubits: vec![q],
        }
    }

    pub fn ry(angle: f64, q: usize) -> Self {
        Gate {
            kind: GateKind::RotationY(angle),
            qubits: vec![q],
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Gate::new(GateKind::ControlledNot, vec![control, target]).expect("distinct qubits")
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Gate::new(GateKind::ControlledZ, vec![control, target]).expect("distinct qubits")
    }

    pub fn cry(angle: f64, control: usize, target: usize) -> Self {
        Gate::new(GateKind::ControlledRotationY(angle), vec![control, target])
            .expect("distinct qubits")
    }

    pub fn ccx(c0: usize, c1: usize, target: usize) -> Self {
        Gate::new(GateKind::Toffoli, vec![c0, c1, target]).expect("distinct qubits")
    }

    pub fn mcx(controls: &[usize], target: usize) -> Result<Self> {
        let mut qubits = controls.to_vec();
        qubits.push(target);
        Gate::new(GateKind::MultiControlledX(controls.len()), qubits)
    }

    pub fn target(&self) -> usize {
        *self.qubits.last().expect("gates act on at least one qubit")
    }

    pub fn controls(&self) -> &[usize] {
        &self.qubits[..self.qubits.len() - 1]
    }

    pub fn inverse(&self) -> Gate {
        Gate {
            kind: self.kind.inverse(),
            qubits: self.qubits.clone(),
        }
    }

    pub fn is_multi_qubit(&self) -> bool {
        self.qubits.len() >= 2
    }

    pub fn max_qubit(&self) -> usize {
        self.qubits.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        if let Some(a) = self.kind.angle() {
            write!(f, "({a})")?;
        }
        for q in &self.qubits {
            write!(f, " q{q}")?;
        }
        Ok(())
    }
}

/// Ordered gate list over `width` qubits. Qubits at or above
/// `ancilla_offset` are workspace that starts and ends in `|0>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    width: usize,
    ancilla_offset: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize) -> Self {
        Circuit {
            width,
            ancilla_offset: width,
            gates: Vec::new(),
        }
    }

    pub fn with_ancillas(data: usize, ancillas: usize) -> Self {
        Circuit {
            width: data + ancillas,
            ancilla_offset: data,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(width: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut c = Circuit::new(width);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ancilla_offset(&self) -> usize {
        self.ancilla_offset
    }

    pub fn num_ancillas(&self) -> usize {
        self.width - self.ancilla_offset
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.width) {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                width: self.width,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other`, which must not be wider than `self`.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.width > self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                actual: other.width,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Reversed order with each gate inverted.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            ancilla_offset: self.ancilla_offset,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Moves qubit `q` to `map[q]`. `map` must be a permutation of the data
    /// qubits.
    pub fn relabel(&self, map: &[usize]) -> Result<Circuit> {
        if map.len() != self.ancilla_offset {
            return Err(Error::WidthMismatch {
                expected: self.ancilla_offset,
                actual: map.len(),
            });
        }
        let mut seen = vec![false; map.len()];
        for &p in map {
            if p >= map.len() || seen[p] {
                return Err(Error::Domain("relabeling is not a permutation".into()));
            }
            seen[p] = true;
        }
        let gates = self
            .gates
            .iter()
            .map(|g| Gate {
                kind: g.kind,
                qubits: g
                    .qubits
                    .iter()
                    .map(|&q| if q < map.len() { map[q] } else { q })
                    .collect(),
            })
            .collect();
        Ok(Circuit {
            width: self.width,
            ancilla_offset: self.ancilla_offset,
            gates,
        })
    }

    /// Re-homes a block circuit onto `qubits` of a wider register.
    pub fn embed(&self, qubits: &[usize], width: usize) -> Result<Circuit> {
        if qubits.len() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                actual: qubits.len(),
            });
        }
        let mut out = Circuit::new(width);
        for g in &self.gates {
            out.push(Gate {
                kind: g.kind,
                qubits: g.qubits.iter().map(|&q| qubits[q]).collect(),
            })?;
        }
        Ok(out)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "circuit width={} ancillas={}",
            self.width,
            self.num_ancillas()
        )?;
        for g in &self.gates {
            writeln!(f, "  {g}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_repeated_and_out_of_range_qubits() {
        assert!(Gate::new(GateKind::ControlledNot, vec![1, 1]).is_err());
        assert!(Gate::new(GateKind::Toffoli, vec![0, 1]).is_err());
        assert!(Gate::new(GateKind::PhaseRotationZ(f64::NAN), vec![0]).is_err());
        let mut c = Circuit::new(2);
        assert!(matches!(
            c.push(Gate::h(2)),
            Err(Error::QubitOutOfRange { qubit: 2, width: 2 })
        ));
    }

    #[test]
    fn inverse_reverses_and_negates() {
        let c =
            Circuit::from_gates(2, [Gate::ry(0.3, 0), Gate::cx(0, 1), Gate::rz(1.1, 1)]).unwrap();
        let inv = c.inverse();
        assert_eq!(inv.gates()[0], Gate::rz(-1.1, 1));
        assert_eq!(inv.gates()[1], Gate::cx(0, 1));
        assert_eq!(inv.gates()[2], Gate::ry(-0.3, 0));
    }

    #[test]
    fn relabel_requires_permutation() {
        let c = Circuit::from_gates(3, [Gate::cx(0, 2)]).unwrap();
        assert_eq!(c.relabel(&[2, 0, 1]).unwrap().gates()[0], Gate::cx(2, 1));
        assert!(c.relabel(&[0, 0, 1]).is_err());
    }
}
