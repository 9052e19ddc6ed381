use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{exact_distribution, simulate_with, Circuit, Gate, GateKind, OutcomeDistribution, SimConfig};
use crate::error::{Error, Result};
use crate::seed::substream;

/// Default |angle| range of injected rotations.
pub const FAULT_ANGLE_RANGE: (f64, f64) = (PI / 64.0, PI / 8.0);

/// Fresh draws tried per fault before settling for the most visible one.
pub const FAULT_ATTEMPTS: u64 = 64;

/// Smallest single-string expectation shift a drawn fault must cause.
pub const MIN_FAULT_SHIFT: f64 = 0.01;

/// A small-angle rotation inserted before gate `position`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub kind: GateKind,
    pub qubit: usize,
    pub position: usize,
    pub angle: f64,
}

impl FaultSpec {
    pub fn gate(&self) -> Result<Gate> {
        if !matches!(self.kind, GateKind::Rx | GateKind::Ry | GateKind::Rz) {
            return Err(Error::InvalidGate(format!("fault gate must be a rotation, got {}", self.kind.mnemonic())));
        }
        Gate::new(self.kind, &[self.qubit], Some(self.angle))
    }

    /// Uniform kind, qubit and position; |angle| uniform in `range` with a
    /// random sign.
    pub fn random<R: Rng + ?Sized>(c: &Circuit, range: (f64, f64), rng: &mut R) -> FaultSpec {
        let kind = [GateKind::Rz, GateKind::Ry, GateKind::Rx][rng.random_range(0..3)];
        let qubit = rng.random_range(0..c.n_qubits());
        let position = rng.random_range(0..=c.len());
        let magnitude = if range.0 < range.1 { rng.random_range(range.0..=range.1) } else { range.0 };
        let angle = if rng.random_bool(0.5) { magnitude } else { -magnitude };
        FaultSpec { kind, qubit, position, angle }
    }
}

pub fn inject_fault(c: &Circuit, f: &FaultSpec) -> Result<Circuit> {
    if f.qubit >= c.n_qubits() {
        return Err(Error::QubitOutOfRange { index: f.qubit, n_qubits: c.n_qubits() });
    }
    let mut out = c.clone().with_name(format!("{}_fault", c.name()));
    out.insert(f.position, f.gate()?)?;
    Ok(out)
}

/// Inverse of [`inject_fault`]: removes the fault gate and restores `name`.
pub fn remove_fault(c: &Circuit, f: &FaultSpec, name: &str) -> Result<Circuit> {
    let expected = f.gate()?;
    match c.gates().get(f.position) {
        Some(g) if *g == expected => {
            let mut out = c.clone().with_name(name);
            out.remove(f.position);
            Ok(out)
        }
        _ => Err(Error::InvalidConfig(format!("no fault {} at position {}", expected, f.position))),
    }
}

/// The fault-free circuit under a fresh name.
pub fn make_equivalent(c: &Circuit) -> Circuit {
    c.clone().with_name(format!("{}_eq", c.name()))
}

fn dense(d: &OutcomeDistribution) -> Vec<f64> {
    let mut v = vec![0.0; 1usize << d.n_qubits()];
    for (b, p) in d.iter() {
        v[b as usize] = p;
    }
    v
}

/// max over Z-family strings S of |E_S(a) − E_S(b)|, via a Walsh–Hadamard
/// transform of the probability difference.
pub fn max_string_shift(a: &OutcomeDistribution, b: &OutcomeDistribution) -> f64 {
    let mut v: Vec<f64> = dense(a).iter().zip(dense(b)).map(|(x, y)| x - y).collect();
    let mut h = 1;
    while h < v.len() {
        for block in v.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (p, q) = (*x, *y);
                *x = p + q;
                *y = p - q;
            }
        }
        h *= 2;
    }
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `count` faults for `c`, fault `i` drawn from sub-stream (seed, i, attempt).
/// A draw is kept once some single Z-family string shifts its expectation
/// by more than `min_shift`; faults below that (for example a Z rotation
/// just before measurement) cannot fail any single-term test case. After
/// [`FAULT_ATTEMPTS`] draws the most visible one is kept.
pub fn draw_faults(
    c: &Circuit,
    count: usize,
    seed: u64,
    range: (f64, f64),
    min_shift: f64,
    config: &SimConfig,
) -> Result<Vec<FaultSpec>> {
    let ideal = exact_distribution(&simulate_with(c, config)?);
    let mut out = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let mut best: Option<(f64, FaultSpec)> = None;
        for attempt in 0..FAULT_ATTEMPTS {
            let f = FaultSpec::random(c, range, &mut substream(seed, &[i, attempt]));
            let faulty = exact_distribution(&simulate_with(&inject_fault(c, &f)?, config)?);
            let shift = max_string_shift(&faulty, &ideal);
            if best.is_none_or(|(s, _)| shift > s) {
                best = Some((shift, f));
            }
            if shift > min_shift {
                break;
            }
        }
        out.push(best.expect("at least one attempt").1);
    }
    Ok(out)
}
