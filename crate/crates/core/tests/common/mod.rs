//! Dense-matrix reference model shared by the integration tests. Everything
//! here is built from textbook matrices and Kronecker structure, without
//! touching the crate's simulator kernels.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use pauliprobe::circuit::{Circuit, Gate, GateKind};
use pauliprobe::oracle::{TestCase, Term};
use pauliprobe::pauli::{Pauli, PauliString};

pub type Mat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(p: Pauli) -> [[Complex64; 2]; 2] {
    match p {
        Pauli::I => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
        Pauli::X => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        Pauli::Y => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
        Pauli::Z => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
    }
}

/// exp(−iθP/2) = cos(θ/2)·I − i·sin(θ/2)·P.
fn rotation(p: Pauli, theta: f64) -> [[Complex64; 2]; 2] {
    let m = pauli_matrix(p);
    let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut out = [[c(0., 0.); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { cos } else { 0.0 };
            out[i][j] = c(id, 0.0) + c(0.0, -sin) * m[i][j];
        }
    }
    out
}

pub fn one_qubit(kind: GateKind, angle: Option<f64>) -> [[Complex64; 2]; 2] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let phase = |phi: f64| [[c(1., 0.), c(0., 0.)], [c(0., 0.), Complex64::from_polar(1.0, phi)]];
    let pi = std::f64::consts::PI;
    match kind {
        GateKind::H => [[c(r, 0.), c(r, 0.)], [c(r, 0.), c(-r, 0.)]],
        GateKind::X => pauli_matrix(Pauli::X),
        GateKind::Y => pauli_matrix(Pauli::Y),
        GateKind::Z => pauli_matrix(Pauli::Z),
        GateKind::S => phase(pi / 2.0),
        GateKind::Sdg => phase(-pi / 2.0),
        GateKind::T => phase(pi / 4.0),
        GateKind::Tdg => phase(-pi / 4.0),
        GateKind::Rx => rotation(Pauli::X, angle.unwrap()),
        GateKind::Ry => rotation(Pauli::Y, angle.unwrap()),
        GateKind::Rz => rotation(Pauli::Z, angle.unwrap()),
        _ => panic!("not a one-qubit gate"),
    }
}

fn bit(i: usize, q: usize) -> usize {
    (i >> q) & 1
}

/// Full 2^n operator of `m` acting on qubit `q` (qubit 0 least significant).
pub fn embed1(n: usize, q: usize, m: &[[Complex64; 2]; 2]) -> Mat {
    let dim = 1 << n;
    Mat::from_fn(dim, dim, |i, j| {
        if (i ^ j) & !(1 << q) != 0 {
            c(0., 0.)
        } else {
            m[bit(i, q)][bit(j, q)]
        }
    })
}

/// Permutation-type two-qubit gates as explicit basis maps.
fn embed2(n: usize, kind: GateKind, a: usize, b: usize) -> Mat {
    let dim = 1 << n;
    let mut m = Mat::zeros(dim, dim);
    for j in 0..dim {
        let (ba, bb) = (bit(j, a), bit(j, b));
        let (i, amp) = match kind {
            GateKind::Cx => (if ba == 1 { j ^ (1 << b) } else { j }, 1.0),
            GateKind::Cz => (j, if ba == 1 && bb == 1 { -1.0 } else { 1.0 }),
            GateKind::Swap => {
                let cleared = j & !(1 << a) & !(1 << b);
                (cleared | (bb << a) | (ba << b), 1.0)
            }
            _ => panic!("not a two-qubit gate"),
        };
        m[(i, j)] = c(amp, 0.0);
    }
    m
}

pub fn gate_operator(n: usize, g: &Gate) -> Mat {
    match *g.qubits() {
        [q] => embed1(n, q, &one_qubit(g.kind(), g.angle())),
        [a, b] => embed2(n, g.kind(), a, b),
        _ => unreachable!(),
    }
}

pub fn unitary(circuit: &Circuit) -> Mat {
    let n = circuit.n_qubits();
    circuit
        .gates()
        .iter()
        .fold(Mat::identity(1 << n, 1 << n), |u, g| gate_operator(n, g) * u)
}

pub fn state(circuit: &Circuit) -> Vec<Complex64> {
    unitary(circuit).column(0).iter().copied().collect()
}

pub fn pauli_operator(p: &PauliString) -> Mat {
    let n = p.len();
    (0..n).fold(Mat::identity(1 << n, 1 << n), |acc, q| embed1(n, q, &pauli_matrix(p.op(q))) * acc)
}

/// ⟨ψ| Σ c_i S_i |ψ⟩.
pub fn dense_expectation(psi: &[Complex64], test: &TestCase) -> f64 {
    let n = psi.len().trailing_zeros() as usize;
    let v = nalgebra::DVector::from_column_slice(psi);
    let mut h = Mat::zeros(1 << n, 1 << n);
    for t in test.terms() {
        h += pauli_operator(&t.pauli) * c(t.coeff, 0.0);
    }
    (v.adjoint() * h * &v)[(0, 0)].re
}

pub fn probabilities(psi: &[Complex64]) -> Vec<f64> {
    psi.iter().map(|a| a.norm_sqr()).collect()
}

/// Random gate list over every kind.
pub fn random_circuit<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Circuit {
    let mut gates = Vec::new();
    while gates.len() < depth {
        let kind = GateKind::ALL[rng.random_range(0..GateKind::ALL.len())];
        if kind.arity() == 2 && n < 2 {
            continue;
        }
        let a = rng.random_range(0..n);
        let qubits = if kind.arity() == 2 { vec![a, (a + rng.random_range(1..n)) % n] } else { vec![a] };
        let angle = kind.is_rotation().then(|| rng.random_range(-4.0..4.0));
        gates.push(Gate::new(kind, &qubits, angle).unwrap());
    }
    Circuit::from_gates(n, "random", gates).unwrap()
}

/// Up to `max_terms` distinct Z-family terms with coefficients in [−1, 1].
pub fn random_z_test<R: Rng>(rng: &mut R, n: usize, max_terms: usize) -> TestCase {
    let k = rng.random_range(1..=max_terms.min(1 << n));
    let masks = rand::seq::index::sample(rng, 1 << n, k);
    let terms = masks
        .into_iter()
        .map(|m| Term { pauli: PauliString::from_z_mask(n, m as u64), coeff: rng.random_range(-1.0..=1.0) })
        .collect();
    TestCase::new(terms).unwrap()
}
