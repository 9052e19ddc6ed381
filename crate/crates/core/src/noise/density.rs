use num_complex::Complex64;

use crate::circuit::{single_qubit_matrix, Circuit, Gate, OutcomeDistribution, StateVector};
use crate::error::{Error, Result};

use super::NoiseModel;

/// Largest register propagated as a density matrix (4^n amplitudes).
pub const MAX_CHANNEL_QUBITS: usize = 10;

// ρ is stored as a vector over 2n qubits: entry (r, c) sits at r + (c << n),
// so U acts on the low half and conj(U) on the high half.

fn apply_unitary(rho: &mut StateVector, g: &Gate, n: usize) {
    rho.apply(g);
    match *g.qubits() {
        [q] => {
            let m = single_qubit_matrix(g);
            let conj = [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]];
            rho.apply_matrix(q + n, &conj);
        }
        [a, b] => {
            // CX, CZ and SWAP are real.
            let shifted = Gate::new(g.kind(), &[a + n, b + n], None).expect("valid shifted gate");
            rho.apply(&shifted);
        }
        _ => unreachable!("gates act on one or two qubits"),
    }
}

/// (XρX + YρY + ZρZ) / 3 on qubit `q`.
fn twirl(rho: &StateVector, q: usize, n: usize) -> StateVector {
    let len = rho.amplitudes().len();
    let mut acc = vec![Complex64::new(0.0, 0.0); len];
    for (p, sign) in [(Gate::x(q), 1.0), (Gate::y(q), -1.0), (Gate::z(q), 1.0)] {
        let mut term = rho.clone();
        term.apply(&p);
        // conj(Y) = −Y; X and Z are real.
        let hi = Gate::new(p.kind(), &[q + n], None).expect("valid gate");
        term.apply(&hi);
        for (a, t) in acc.iter_mut().zip(term.amplitudes()) {
            *a += t * (sign / 3.0);
        }
    }
    StateVector::from_raw(rho.n_qubits(), acc)
}

fn depolarize(rho: &mut StateVector, qubits: &[usize], p: f64, n: usize) {
    let mut mixed = twirl(rho, qubits[0], n);
    for &q in &qubits[1..] {
        mixed = twirl(&mixed, q, n);
    }
    for (r, m) in rho.amplitudes_mut().iter_mut().zip(mixed.amplitudes()) {
        *r = *r * (1.0 - p) + m * p;
    }
}

/// Independent bit flips with probability `flip` on every qubit of a dense
/// probability vector.
pub fn apply_readout(probs: &mut [f64], n: usize, flip: f64) {
    if flip == 0.0 {
        return;
    }
    for q in 0..n {
        let bit = 1usize << q;
        for b in 0..probs.len() {
            if b & bit == 0 {
                let (p0, p1) = (probs[b], probs[b | bit]);
                probs[b] = (1.0 - flip) * p0 + flip * p1;
                probs[b | bit] = flip * p0 + (1.0 - flip) * p1;
            }
        }
    }
}

/// Exact outcome distribution of `c` under `model`, computed by propagating
/// the density matrix through every gate and depolarizing channel and then
/// applying the readout channel.
pub fn channel_distribution(c: &Circuit, model: &NoiseModel) -> Result<OutcomeDistribution> {
    model.validate()?;
    let n = c.n_qubits();
    if n > MAX_CHANNEL_QUBITS {
        return Err(Error::Resource { n_qubits: n, max_qubits: MAX_CHANNEL_QUBITS });
    }
    let mut rho = StateVector::zero(2 * n);
    for g in c.gates() {
        apply_unitary(&mut rho, g, n);
        let p = model.gate_error(g);
        if p > 0.0 {
            depolarize(&mut rho, g.qubits(), p, n);
        }
    }
    let amps = rho.amplitudes();
    let mut probs: Vec<f64> = (0..1usize << n).map(|b| amps[b | (b << n)].re.max(0.0)).collect();
    apply_readout(&mut probs, n, model.readout());
    Ok(OutcomeDistribution::from_probabilities(n, probs.into_iter().enumerate().map(|(b, p)| (b as u64, p))))
}
