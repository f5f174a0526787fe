//! Lowering to the {RZ, H, CNOT} basis.
//!
//! Alongside the flat base-gate list, a [`TranspiledCircuit`] remembers
//! which source gate (and, for multi-controlled X, which Toffoli of its
//! V-chain) produced each base gate. The trajectory engine applies error-free
//! stretches at the coarsest level and only replays base gates where an error
//! lands.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Range;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::resources::{mcx_vchain, toffoli_network, vchain_ancillas};

pub fn is_basis_gate(g: &Gate) -> bool {
    matches!(
        g.kind,
        GateKind::PhaseRotationZ(_) | GateKind::Hadamard | GateKind::ControlledNot
    )
}

fn ry_basis(a: f64, q: usize) -> Vec<Gate> {
    vec![
        Gate::rz(-FRAC_PI_2, q),
        Gate::h(q),
        Gate::rz(a, q),
        Gate::h(q),
        Gate::rz(FRAC_PI_2, q),
    ]
}

/// Basis gates for one non-multi-controlled gate; equal to it up to a
/// global phase.
fn lower(g: &Gate) -> Result<Vec<Gate>> {
    let q = &g.qubits;
    Ok(match g.kind {
        GateKind::Hadamard | GateKind::PhaseRotationZ(_) | GateKind::ControlledNot => {
            vec![g.clone()]
        }
        GateKind::PauliX => vec![Gate::h(q[0]), Gate::rz(PI, q[0]), Gate::h(q[0])],
        GateKind::PauliZ => vec![Gate::rz(PI, q[0])],
        GateKind::RotationY(a) => ry_basis(a, q[0]),
        GateKind::ControlledZ => vec![Gate::h(q[1]), Gate::cx(q[0], q[1]), Gate::h(q[1])],
        GateKind::ControlledRotationY(a) => {
            let mut v = ry_basis(a / 2.0, q[1]);
            v.push(Gate::cx(q[0], q[1]));
            v.extend(ry_basis(-a / 2.0, q[1]));
            v.push(Gate::cx(q[0], q[1]));
            v
        }
        GateKind::Toffoli => toffoli_network(q[0], q[1], q[2]),
        GateKind::MultiControlledX(_) => {
            return Err(Error::Unsupported(
                "multi-controlled X must be expanded first".into(),
            ))
        }
    })
}

/// A Toffoli of a V-chain and its base gates.
#[derive(Clone, Debug, PartialEq)]
pub struct Macro {
    pub gate: Gate,
    pub base: Range<usize>,
}

/// One source gate and its base gates.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub source: Gate,
    pub base: Range<usize>,
    /// Non-empty for multi-controlled X lowered through a V-chain.
    pub macros: Vec<Macro>,
    /// Whether any base gate touches an ancilla.
    pub touches_ancillas: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TranspiledCircuit {
    data_width: usize,
    width: usize,
    base: Vec<Gate>,
    segments: Vec<Segment>,
}

impl TranspiledCircuit {
    /// Lowers `circuit`. Multi-controlled X gates borrow clean ancillas at
    /// indices `circuit.ancilla_offset()` and up.
    pub fn new(circuit: &Circuit) -> Result<Self> {
        let data = circuit.ancilla_offset();
        let needed = circuit
            .gates()
            .iter()
            .filter_map(|g| match g.kind {
                GateKind::MultiControlledX(k) => Some(vchain_ancillas(k)),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let width = circuit.width().max(data + needed);
        let ancillas: Vec<usize> = (data..width).collect();
        let mut base = Vec::new();
        let mut segments = Vec::new();
        for g in circuit.gates() {
            let start = base.len();
            let mut macros = Vec::new();
            match g.kind {
                GateKind::MultiControlledX(k) if k >= 3 => {
                    for t in mcx_vchain(g.controls(), g.target(), &ancillas)? {
                        let s = base.len();
                        base.extend(lower(&t)?);
                        macros.push(Macro {
                            gate: t,
                            base: s..base.len(),
                        });
                    }
                }
                GateKind::MultiControlledX(_) => {
                    for t in mcx_vchain(g.controls(), g.target(), &[])? {
                        base.extend(lower(&t)?);
                    }
                }
                _ => base.extend(lower(g)?),
            }
            let range = start..base.len();
            let touches_ancillas = base[range.clone()]
                .iter()
                .any(|b| b.qubits.iter().any(|&q| q >= data));
            segments.push(Segment {
                source: g.clone(),
                base: range,
                macros,
                touches_ancillas,
            });
        }
        Ok(TranspiledCircuit {
            data_width: data,
            width,
            base,
            segments,
        })
    }

    /// Wraps a circuit that is already in the basis, one segment per gate.
    pub fn from_basis(circuit: &Circuit) -> Result<Self> {
        if let Some(g) = circuit.gates().iter().find(|g| !is_basis_gate(g)) {
            return Err(Error::Unsupported(format!(
                "{g} is outside the rz/h/cx basis"
            )));
        }
        TranspiledCircuit::new(circuit)
    }

    pub fn data_width(&self) -> usize {
        self.data_width
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn base_gates(&self) -> &[Gate] {
        &self.base
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::with_ancillas(self.data_width, self.width - self.data_width);
        for g in &self.base {
            c.push(g.clone()).expect("lowered gates stay in range");
        }
        c
    }
}

/// Lowers `circuit` to {RZ, H, CNOT}, adding V-chain ancillas as needed.
pub fn transpile(circuit: &Circuit) -> Result<Circuit> {
    Ok(TranspiledCircuit::new(circuit)?.to_circuit())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::diffusion_circuit;
    use crate::prep::{dicke11_circuit, dicke1_circuit, ghz_x_circuit};
    use crate::simulator::StateVector;
    use num_complex::Complex64;

    /// Columns of the circuit unitary for inputs with clean ancillas.
    fn columns(c: &Circuit, data: usize, width: usize) -> Vec<Vec<Complex64>> {
        (0..1usize << data)
            .map(|col| {
                let mut amps = vec![Complex64::new(0.0, 0.0); 1 << width];
                amps[col] = Complex64::new(1.0, 0.0);
                let mut s = StateVector::from_amplitudes(amps).unwrap();
                let mut wide = Circuit::with_ancillas(data, width - data);
                wide.extend(c).unwrap();
                s.apply_circuit(&wide).unwrap();
                s.amplitudes().to_vec()
            })
            .collect()
    }

    /// Same unitary up to a global phase, with ancillas returned clean.
    fn assert_equivalent(original: &Circuit) {
        let t = transpile(original).unwrap();
        assert!(t.gates().iter().all(is_basis_gate));
        let data = original.ancilla_offset();
        let a = columns(original, data, t.width());
        let b = columns(&t, data, t.width());
        let (i, j) = (0..a.len())
            .flat_map(|j| (0..a[j].len()).map(move |i| (i, j)))
            .find(|&(i, j)| a[j][i].norm() > 0.1)
            .unwrap();
        let phase = b[j][i] / a[j][i];
        assert!((phase.norm() - 1.0).abs() < 1e-8);
        for (ca, cb) in a.iter().zip(&b) {
            for (x, y) in ca.iter().zip(cb) {
                assert!((x * phase - y).norm() < 1e-8, "{original}");
            }
        }
    }

    #[test]
    fn single_gate_rules() {
        assert_eq!(
            transpile(&Circuit::from_gates(2, [Gate::cx(0, 1)]).unwrap())
                .unwrap()
                .gates(),
            &[Gate::cx(0, 1)]
        );
        assert_eq!(
            transpile(&Circuit::from_gates(1, [Gate::x(0)]).unwrap())
                .unwrap()
                .gates(),
            &[Gate::h(0), Gate::rz(PI, 0), Gate::h(0)]
        );
        let gates = [
            Gate::x(0),
            Gate::z(1),
            Gate::h(2),
            Gate::ry(0.7, 0),
            Gate::rz(-1.3, 1),
            Gate::cx(2, 0),
            Gate::cz(0, 2),
            Gate::cry(1.1, 1, 0),
            Gate::ccx(0, 1, 2),
            Gate::ccx(2, 0, 1),
        ];
        for g in gates {
            assert_equivalent(&Circuit::from_gates(3, [g]).unwrap());
        }
        let toffoli = transpile(&Circuit::from_gates(3, [Gate::ccx(0, 1, 2)]).unwrap()).unwrap();
        assert_eq!(
            toffoli
                .gates()
                .iter()
                .filter(|g| g.kind == GateKind::ControlledNot)
                .count(),
            6
        );
    }

    #[test]
    fn multi_controlled_x() {
        for k in 1..=3 {
            let mut c = Circuit::new(k + 1);
            c.push(Gate::mcx(&(0..k).collect::<Vec<_>>(), k).unwrap())
                .unwrap();
            assert_equivalent(&c);
        }
        let mut c = Circuit::new(5);
        c.push(Gate::mcx(&[4, 0, 2], 1).unwrap()).unwrap();
        assert_equivalent(&c);
    }

    #[test]
    fn builder_circuits_and_diffusion() {
        for mu in 1..=5 {
            assert_equivalent(&dicke1_circuit(mu).unwrap());
            assert_equivalent(&dicke11_circuit(mu).unwrap());
            assert_equivalent(&ghz_x_circuit(mu, 0).unwrap());
            assert_equivalent(&ghz_x_circuit(mu, 1).unwrap());
        }
        for n in 1..=4 {
            assert_equivalent(&diffusion_circuit(&dicke1_circuit(n).unwrap(), n).unwrap());
        }
    }

    #[test]
    fn segments_cover_the_base_list() {
        let d = diffusion_circuit(&dicke1_circuit(6).unwrap(), 6).unwrap();
        let t = TranspiledCircuit::new(&d).unwrap();
        let mut next = 0;
        for s in t.segments() {
            assert_eq!(s.base.start, next);
            next = s.base.end;
            if let GateKind::MultiControlledX(k) = s.source.kind {
                assert_eq!(s.macros.len(), 2 * k - 3);
                assert!(s.touches_ancillas);
            }
        }
        assert_eq!(next, t.base_gates().len());
        assert_eq!(t.width(), 6 + 3);
        assert!(TranspiledCircuit::from_basis(&d).is_err());
    }
}
