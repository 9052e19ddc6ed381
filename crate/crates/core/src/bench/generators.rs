use std::f64::consts::TAU;

use rand::Rng;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::seed::{label_hash, substream};

/// Names accepted by [`generate`].
pub const GENERATORS: [&str; 7] = ["ghz", "wstate", "dj", "graph", "su2", "twolocal", "random"];

/// Repetitions of the entangling block in `su2` and `twolocal`.
const ANSATZ_REPS: usize = 2;

/// Builds benchmark circuit `name` on `n` qubits. Seeded generators derive
/// all their randomness from `seed`.
pub fn generate(name: &str, n: usize, seed: u64) -> Result<Circuit> {
    let min = if name == "graph" { 3 } else { 2 };
    if n < min {
        return Err(Error::InvalidConfig(format!("{name} needs at least {min} qubits, got {n}")));
    }
    let gates = match name {
        "ghz" => ghz(n),
        "wstate" => wstate(n),
        "dj" => dj(n, seed),
        "graph" => graph(n, seed),
        "su2" => su2(n, seed),
        "twolocal" => twolocal(n, seed),
        "random" => random(n, 4 * n, seed),
        _ => return Err(Error::InvalidConfig(format!("unknown generator `{name}`"))),
    };
    Circuit::from_gates(n, format!("{name}_{n}"), gates)
}

/// Seeded gate soup with `depth` gates.
pub fn random_circuit(n: usize, depth: usize, seed: u64) -> Result<Circuit> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("random needs at least 2 qubits, got {n}")));
    }
    Circuit::from_gates(n, format!("random_{n}"), random(n, depth, seed))
}

fn ghz(n: usize) -> Vec<Gate> {
    let mut g = vec![Gate::h(0)];
    g.extend((1..n).map(|q| Gate::cx(q - 1, q)));
    g
}

/// Amplitude cascade: qubit k keeps 1/(n−k) of the remaining weight and
/// passes the rest to qubit k+1 through a controlled RY and a CX.
fn wstate(n: usize) -> Vec<Gate> {
    let mut g = vec![Gate::x(0)];
    for k in 0..n - 1 {
        let theta = 2.0 * (1.0 / (n - k) as f64).sqrt().acos();
        g.extend([
            Gate::ry(theta / 2.0, k + 1),
            Gate::cx(k, k + 1),
            Gate::ry(-theta / 2.0, k + 1),
            Gate::cx(k, k + 1),
            Gate::cx(k + 1, k),
        ]);
    }
    g
}

/// Balanced Deutsch–Jozsa: inputs 0..n−1, ancilla n−1, oracle f(x) = s·x
/// for a seeded nonzero s. The input register ends in |s⟩.
fn dj(n: usize, seed: u64) -> Vec<Gate> {
    let inputs = n - 1;
    let anc = n - 1;
    let mut rng = substream(seed, &[label_hash("dj")]);
    let s: u64 = rng.random_range(1..1u64 << inputs);
    let mut g = vec![Gate::x(anc)];
    g.extend((0..n).map(Gate::h));
    g.extend((0..inputs).filter(|&q| s >> q & 1 == 1).map(|q| Gate::cx(q, anc)));
    g.extend((0..n).map(Gate::h));
    g
}

/// Graph state over a seeded edge set: a spanning path in shuffled order
/// plus each remaining pair with probability ½.
fn graph(n: usize, seed: u64) -> Vec<Gate> {
    let mut rng = substream(seed, &[label_hash("graph")]);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut edges: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0].min(w[1]), w[0].max(w[1]))).collect();
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.random_bool(0.5) {
                edges.push((a, b));
            }
        }
    }
    edges.sort_unstable();
    let mut g: Vec<Gate> = (0..n).map(Gate::h).collect();
    g.extend(edges.into_iter().map(|(a, b)| Gate::cz(a, b)));
    g
}

fn su2(n: usize, seed: u64) -> Vec<Gate> {
    let mut rng = substream(seed, &[label_hash("su2")]);
    let mut g = Vec::new();
    for rep in 0..=ANSATZ_REPS {
        for q in 0..n {
            g.push(Gate::ry(rng.random_range(0.0..TAU), q));
            g.push(Gate::rz(rng.random_range(0.0..TAU), q));
        }
        if rep < ANSATZ_REPS {
            g.extend((1..n).map(|q| Gate::cx(q - 1, q)));
        }
    }
    g
}

fn twolocal(n: usize, seed: u64) -> Vec<Gate> {
    let mut rng = substream(seed, &[label_hash("twolocal")]);
    let mut g = Vec::new();
    for rep in 0..=ANSATZ_REPS {
        g.extend((0..n).map(|q| Gate::ry(rng.random_range(0.0..TAU), q)));
        if rep < ANSATZ_REPS {
            g.extend((0..n).map(|q| Gate::cx(q, (q + 1) % n)));
        }
    }
    g
}

fn random(n: usize, depth: usize, seed: u64) -> Vec<Gate> {
    let mut rng = substream(seed, &[label_hash("random")]);
    (0..depth)
        .map(|_| {
            let kind = GateKind::ALL[rng.random_range(0..GateKind::ALL.len())];
            let a = rng.random_range(0..n);
            let qubits = if kind.arity() == 2 {
                let b = (a + rng.random_range(1..n)) % n;
                vec![a, b]
            } else {
                vec![a]
            };
            let angle = kind.is_rotation().then(|| rng.random_range(0.0..TAU));
            Gate::new(kind, &qubits, angle).expect("well-formed random gate")
        })
        .collect()
}
