use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Circuit, Gate, GateKind, OutcomeDistribution, DEFAULT_MAX_QUBITS, MAX_REGISTER};
use crate::error::{Error, Result};

type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub max_qubits: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { max_qubits: DEFAULT_MAX_QUBITS }
    }
}

/// Dense pure state over `n` qubits, little-endian amplitude indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n_qubits`.
    pub fn zero(n_qubits: usize) -> StateVector {
        assert!(n_qubits <= MAX_REGISTER);
        let mut amps = vec![ZERO; 1usize << n_qubits];
        amps[0] = ONE;
        StateVector { n_qubits, amps }
    }

    /// Wraps raw amplitudes, rejecting wrong lengths or unnormalized input.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        let expected = 1usize << n_qubits;
        if amps.len() != expected {
            return Err(Error::LengthMismatch { expected, found: amps.len() });
        }
        let sv = StateVector { n_qubits, amps };
        let norm = sv.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidConfig(format!("state norm² is {norm}, expected 1")));
        }
        Ok(sv)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Unchecked wrapper for callers that manage normalization themselves.
    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> StateVector {
        debug_assert_eq!(amps.len(), 1usize << n_qubits);
        StateVector { n_qubits, amps }
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &Gate) {
        let q = gate.qubits();
        match gate.kind() {
            GateKind::Z => self.phase(q[0], -ONE),
            GateKind::S => self.phase(q[0], I),
            GateKind::Sdg => self.phase(q[0], -I),
            GateKind::T => self.phase(q[0], Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
            GateKind::Tdg => {
                self.phase(q[0], Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4))
            }
            GateKind::Rz => {
                let half = gate.angle().unwrap_or(0.0) / 2.0;
                self.diagonal(q[0], Complex64::from_polar(1.0, -half), Complex64::from_polar(1.0, half))
            }
            GateKind::Cx => self.cx(q[0], q[1]),
            GateKind::Cz => self.cz(q[0], q[1]),
            GateKind::Swap => self.swap(q[0], q[1]),
            GateKind::H | GateKind::X | GateKind::Y | GateKind::Rx | GateKind::Ry => {
                self.apply_matrix(q[0], &single_qubit_matrix(gate))
            }
        }
    }

    /// Applies an arbitrary 2×2 operator to qubit `q`.
    pub fn apply_matrix(&mut self, q: usize, m: &Matrix2) {
        let stride = 1usize << q;
        for block in self.amps.chunks_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a0, *a1);
                *a0 = m[0][0] * x + m[0][1] * y;
                *a1 = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    fn diagonal(&mut self, q: usize, d0: Complex64, d1: Complex64) {
        let stride = 1usize << q;
        for block in self.amps.chunks_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.iter_mut().for_each(|a| *a *= d0);
            hi.iter_mut().for_each(|a| *a *= d1);
        }
    }

    fn phase(&mut self, q: usize, d1: Complex64) {
        let bit = 1usize << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & bit != 0 {
                *a *= d1;
            }
        }
    }

    fn cx(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    fn cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ba) | bb);
            }
        }
    }
}

/// The 2×2 unitary of a single-qubit gate.
///
/// # Panics
/// If `gate` acts on two qubits.
pub(crate) fn single_qubit_matrix(gate: &Gate) -> Matrix2 {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let theta = gate.angle().unwrap_or(0.0);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    match gate.kind() {
        GateKind::H => [[h, h], [h, -h]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::T => [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)]],
        GateKind::Tdg => {
            [[ONE, ZERO], [ZERO, Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)]]
        }
        GateKind::Rx => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        GateKind::Ry => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        GateKind::Rz => [
            [Complex64::from_polar(1.0, -theta / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, theta / 2.0)],
        ],
        GateKind::Cx | GateKind::Cz | GateKind::Swap => {
            panic!("{} is not a single-qubit gate", gate.kind().mnemonic())
        }
    }
}

/// Runs `circuit` on |0…0⟩ under the default qubit cap.
pub fn simulate(circuit: &Circuit) -> Result<StateVector> {
    simulate_with(circuit, &SimConfig::default())
}

pub fn simulate_with(circuit: &Circuit, config: &SimConfig) -> Result<StateVector> {
    if circuit.n_qubits() > config.max_qubits {
        return Err(Error::Resource { n_qubits: circuit.n_qubits(), max_qubits: config.max_qubits });
    }
    let mut sv = StateVector::zero(circuit.n_qubits());
    for g in circuit.gates() {
        sv.apply(g);
    }
    Ok(sv)
}

/// |amplitude|² for every outcome at or above the sparsity floor.
pub fn exact_distribution(sv: &StateVector) -> OutcomeDistribution {
    OutcomeDistribution::from_probabilities(
        sv.n_qubits(),
        sv.amps.iter().enumerate().map(|(i, a)| (i as u64, a.norm_sqr())),
    )
}
