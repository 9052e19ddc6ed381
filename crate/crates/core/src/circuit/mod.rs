//! Circuits, the text format, dense statevector simulation and outcome
//! distributions.
//!
//! Qubit ordering is little-endian throughout: qubit 0 is the least
//! significant bit of an outcome index. Outcome bitstrings and Pauli strings
//! are rendered most-significant qubit first, so the leftmost character
//! always belongs to the highest-index qubit.

mod distribution;
mod parse;
mod statevector;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use distribution::{sample, OutcomeDistribution, OutcomeSampler, Source, SPARSITY_FLOOR};
pub use parse::parse_circuit;
pub(crate) use statevector::single_qubit_matrix;
pub use statevector::{exact_distribution, simulate, simulate_with, SimConfig, StateVector};

/// Hard ceiling on register width; anything above cannot be indexed by the
/// outcome and Pauli bit masks.
pub const MAX_REGISTER: usize = 32;

/// Default simulation cap: 2^24 amplitudes, 256 MiB of complex doubles.
pub const DEFAULT_MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    Cx,
    Cz,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 14] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Swap,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.mnemonic() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }
}

/// A single gate application. Qubit indices are distinct; `angle` is present
/// exactly for the rotation gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 2],
    angle: Option<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize], angle: Option<f64>) -> Result<Gate> {
        if qubits.len() != kind.arity() {
            return Err(Error::InvalidGate(format!(
                "{} takes {} qubit(s), got {}",
                kind.mnemonic(),
                kind.arity(),
                qubits.len()
            )));
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(Error::InvalidGate(format!(
                "duplicate qubit index {} in {}",
                qubits[0],
                kind.mnemonic()
            )));
        }
        match (kind.is_rotation(), angle) {
            (true, None) => {
                return Err(Error::InvalidGate(format!("{} requires an angle", kind.mnemonic())))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidGate(format!("{} takes no angle", kind.mnemonic())))
            }
            (true, Some(a)) if !a.is_finite() => {
                return Err(Error::InvalidGate(format!("non-finite angle {a}")))
            }
            _ => {}
        }
        let second = if kind.arity() == 2 { qubits[1] } else { qubits[0] };
        Ok(Gate { kind, qubits: [qubits[0], second], angle })
    }

    fn one(kind: GateKind, q: usize) -> Gate {
        Gate { kind, qubits: [q, q], angle: None }
    }

    pub fn h(q: usize) -> Gate {
        Gate::one(GateKind::H, q)
    }
    pub fn x(q: usize) -> Gate {
        Gate::one(GateKind::X, q)
    }
    pub fn y(q: usize) -> Gate {
        Gate::one(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Gate {
        Gate::one(GateKind::Z, q)
    }
    pub fn s(q: usize) -> Gate {
        Gate::one(GateKind::S, q)
    }
    pub fn sdg(q: usize) -> Gate {
        Gate::one(GateKind::Sdg, q)
    }
    pub fn t(q: usize) -> Gate {
        Gate::one(GateKind::T, q)
    }
    pub fn tdg(q: usize) -> Gate {
        Gate::one(GateKind::Tdg, q)
    }

    /// Rotation about `axis` (one of Rx, Ry, Rz).
    ///
    /// # Panics
    /// If `axis` is not a rotation kind or `theta` is not finite.
    pub fn rotation(axis: GateKind, theta: f64, q: usize) -> Gate {
        assert!(axis.is_rotation(), "{} is not a rotation", axis.mnemonic());
        assert!(theta.is_finite(), "non-finite rotation angle");
        Gate { kind: axis, qubits: [q, q], angle: Some(theta) }
    }
    pub fn rx(theta: f64, q: usize) -> Gate {
        Gate::rotation(GateKind::Rx, theta, q)
    }
    pub fn ry(theta: f64, q: usize) -> Gate {
        Gate::rotation(GateKind::Ry, theta, q)
    }
    pub fn rz(theta: f64, q: usize) -> Gate {
        Gate::rotation(GateKind::Rz, theta, q)
    }

    fn two(kind: GateKind, a: usize, b: usize) -> Gate {
        assert_ne!(a, b, "two-qubit gate on a single qubit");
        Gate { kind, qubits: [a, b], angle: None }
    }
    pub fn cx(control: usize, target: usize) -> Gate {
        Gate::two(GateKind::Cx, control, target)
    }
    pub fn cz(a: usize, b: usize) -> Gate {
        Gate::two(GateKind::Cz, a, b)
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        Gate::two(GateKind::Swap, a, b)
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    /// The gate undoing this one.
    pub fn inverse(&self) -> Gate {
        let kind = match self.kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            k => k,
        };
        Gate { kind, qubits: self.qubits, angle: self.angle.map(|a| -a) }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.mnemonic())?;
        if let Some(a) = self.angle {
            write!(f, " {a}")?;
        }
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

/// An ordered gate list over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    name: String,
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, name: impl Into<String>) -> Result<Circuit> {
        if n_qubits == 0 || n_qubits > MAX_REGISTER {
            return Err(Error::InvalidConfig(format!(
                "qubit count must lie in 1..={MAX_REGISTER}, got {n_qubits}"
            )));
        }
        Ok(Circuit { name: name.into(), n_qubits, gates: Vec::new() })
    }

    pub fn from_gates(
        n_qubits: usize,
        name: impl Into<String>,
        gates: impl IntoIterator<Item = Gate>,
    ) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits, name)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        self.check(&gate)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Inserts `gate` before position `index` (`index == len` appends).
    pub fn insert(&mut self, index: usize, gate: Gate) -> Result<()> {
        if index > self.gates.len() {
            return Err(Error::InvalidConfig(format!(
                "insertion position {index} beyond gate count {}",
                self.gates.len()
            )));
        }
        self.check(&gate)?;
        self.gates.insert(index, gate);
        Ok(())
    }

    pub fn remove(&mut self, index: usize) -> Option<Gate> {
        (index < self.gates.len()).then(|| self.gates.remove(index))
    }

    fn check(&self, gate: &Gate) -> Result<()> {
        match gate.qubits().iter().find(|&&q| q >= self.n_qubits) {
            Some(&index) => Err(Error::QubitOutOfRange { index, n_qubits: self.n_qubits }),
            None => Ok(()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Circuit {
        self.name = name.into();
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
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

    /// Renders the circuit in the line-oriented text format. Angles use the
    /// shortest round-trip representation, so parsing the output recovers
    /// the circuit exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\nqubits {}\n", self.name, self.n_qubits);
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_validation() {
        assert!(Gate::new(GateKind::Cx, &[0, 0], None).is_err());
        assert!(Gate::new(GateKind::Rz, &[0], None).is_err());
        assert!(Gate::new(GateKind::H, &[0], Some(0.1)).is_err());
        assert!(Gate::new(GateKind::Rx, &[0], Some(f64::NAN)).is_err());
        assert!(Gate::new(GateKind::H, &[0, 1], None).is_err());
        let g = Gate::new(GateKind::Swap, &[2, 1], None).unwrap();
        assert_eq!(g.qubits(), &[2, 1]);
    }

    #[test]
    fn inverse_pairs() {
        assert_eq!(Gate::s(0).inverse(), Gate::sdg(0));
        assert_eq!(Gate::tdg(1).inverse(), Gate::t(1));
        assert_eq!(Gate::ry(0.25, 0).inverse(), Gate::ry(-0.25, 0));
        assert_eq!(Gate::cx(0, 1).inverse(), Gate::cx(0, 1));
    }

    #[test]
    fn circuit_rejects_out_of_range() {
        let mut c = Circuit::new(2, "c").unwrap();
        assert!(matches!(
            c.push(Gate::cx(0, 2)),
            Err(Error::QubitOutOfRange { index: 2, n_qubits: 2 })
        ));
        assert!(Circuit::new(0, "empty").is_err());
    }

    #[test]
    fn insert_and_remove_round_trip() {
        let mut c = Circuit::from_gates(2, "bell", [Gate::h(0), Gate::cx(0, 1)]).unwrap();
        let before = c.clone();
        c.insert(1, Gate::rz(0.1, 0)).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.remove(1), Some(Gate::rz(0.1, 0)));
        assert_eq!(c, before);
        assert!(c.insert(5, Gate::x(0)).is_err());
    }
}
