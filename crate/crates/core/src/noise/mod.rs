//! Synthetic noise and zero-noise extrapolation.
//!
//! Noise is parametric: depolarizing errors after every gate and independent
//! bit flips at readout. It can be sampled by Monte-Carlo trajectories or,
//! for small registers, propagated exactly as a density matrix.

mod density;
mod executor;
mod zne;

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    exact_distribution, simulate_with, Circuit, Gate, OutcomeDistribution, OutcomeSampler, SimConfig,
    StateVector,
};
use crate::error::{Error, Result};

pub use density::{apply_readout, channel_distribution, MAX_CHANNEL_QUBITS};
pub use executor::NoisyExecutor;
pub use zne::{extrapolate, extrapolation_weights, fold_circuit, zne_expectation, ZneConfig, ZneMode};

/// Upper clamp for scaled depolarizing probabilities.
pub const MAX_DEPOLARIZING: f64 = 0.75;
/// Upper clamp for scaled readout flip probabilities.
pub const MAX_READOUT_FLIP: f64 = 0.5;

/// How outcome distributions are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shots {
    Exact,
    Count(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    pub depol_1q: f64,
    pub depol_2q: f64,
    pub readout_flip: f64,
    pub scale: f64,
}

impl Default for NoiseModel {
    fn default() -> NoiseModel {
        NoiseModel { depol_1q: 0.001, depol_2q: 0.01, readout_flip: 0.02, scale: 1.0 }
    }
}

impl NoiseModel {
    pub fn noiseless() -> NoiseModel {
        NoiseModel { depol_1q: 0.0, depol_2q: 0.0, readout_flip: 0.0, scale: 1.0 }
    }

    pub fn readout_only(flip: f64) -> NoiseModel {
        NoiseModel { readout_flip: flip, ..NoiseModel::noiseless() }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("depol_1q", self.depol_1q, MAX_DEPOLARIZING),
            ("depol_2q", self.depol_2q, MAX_DEPOLARIZING),
            ("readout_flip", self.readout_flip, MAX_READOUT_FLIP),
        ];
        for (name, p, max) in checks {
            if !(0.0..=max).contains(&p) {
                return Err(Error::InvalidConfig(format!("{name} = {p} outside [0, {max}]")));
            }
        }
        if !(self.scale >= 0.0) || !self.scale.is_finite() {
            return Err(Error::InvalidConfig(format!("noise scale {} must be finite and ≥ 0", self.scale)));
        }
        Ok(())
    }

    /// The same model amplified by `factor`.
    pub fn scaled(&self, factor: f64) -> NoiseModel {
        NoiseModel { scale: self.scale * factor, ..*self }
    }

    pub fn p1(&self) -> f64 {
        (self.depol_1q * self.scale).clamp(0.0, MAX_DEPOLARIZING)
    }

    pub fn p2(&self) -> f64 {
        (self.depol_2q * self.scale).clamp(0.0, MAX_DEPOLARIZING)
    }

    pub fn readout(&self) -> f64 {
        (self.readout_flip * self.scale).clamp(0.0, MAX_READOUT_FLIP)
    }

    /// Effective depolarizing probability after `gate`.
    pub fn gate_error(&self, gate: &Gate) -> f64 {
        if gate.qubits().len() == 1 {
            self.p1()
        } else {
            self.p2()
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.p1() == 0.0 && self.p2() == 0.0 && self.readout() == 0.0
    }

    pub fn from_json(text: &str) -> Result<NoiseModel> {
        let m: NoiseModel = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<NoiseModel> {
        NoiseModel::from_json(&std::fs::read_to_string(path)?)
    }
}

/// One injected Pauli: (gate index, qubit, 1 = X, 2 = Y, 3 = Z).
type Jump = (u32, u32, u8);

fn draw_pattern<R: Rng + ?Sized>(c: &Circuit, p1: f64, p2: f64, rng: &mut R, out: &mut Vec<Jump>) {
    out.clear();
    for (i, g) in c.gates().iter().enumerate() {
        let p = if g.qubits().len() == 1 { p1 } else { p2 };
        if p > 0.0 && rng.random_bool(p) {
            for &q in g.qubits() {
                out.push((i as u32, q as u32, rng.random_range(1..=3)));
            }
        }
    }
}

fn run_trajectory(c: &Circuit, pattern: &[Jump]) -> StateVector {
    let mut sv = StateVector::zero(c.n_qubits());
    let mut jumps = pattern.iter().peekable();
    for (i, g) in c.gates().iter().enumerate() {
        sv.apply(g);
        while let Some(&&(at, q, op)) = jumps.peek() {
            if at as usize != i {
                break;
            }
            let q = q as usize;
            sv.apply(&match op {
                1 => Gate::x(q),
                2 => Gate::y(q),
                _ => Gate::z(q),
            });
            jumps.next();
        }
    }
    sv
}

/// Monte-Carlo trajectory sampling of `shots` noisy executions.
///
/// Error patterns are drawn for every shot first; each distinct pattern is
/// simulated once and its shots drawn from the resulting distribution, then
/// readout flips are applied shot by shot. With every effective probability
/// zero no randomness is spent on noise, so the result coincides with
/// [`crate::circuit::sample`] under the same generator.
pub fn noisy_sample<R: Rng + ?Sized>(
    c: &Circuit,
    model: &NoiseModel,
    shots: u64,
    rng: &mut R,
    config: &SimConfig,
) -> Result<OutcomeDistribution> {
    model.validate()?;
    if shots == 0 {
        return Err(Error::InvalidConfig("shots must be at least 1".into()));
    }
    if c.n_qubits() > config.max_qubits {
        return Err(Error::Resource { n_qubits: c.n_qubits(), max_qubits: config.max_qubits });
    }
    let (p1, p2, flip) = (model.p1(), model.p2(), model.readout());
    let mut groups: BTreeMap<Vec<Jump>, u64> = BTreeMap::new();
    if p1 == 0.0 && p2 == 0.0 {
        groups.insert(Vec::new(), shots);
    } else {
        let mut pattern = Vec::new();
        for _ in 0..shots {
            draw_pattern(c, p1, p2, rng, &mut pattern);
            match groups.get_mut(&pattern) {
                Some(n) => *n += 1,
                None => {
                    groups.insert(pattern.clone(), 1);
                }
            }
        }
    }

    let n = c.n_qubits();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for (pattern, count) in &groups {
        let sv = if pattern.is_empty() { simulate_with(c, config)? } else { run_trajectory(c, pattern) };
        let sampler = OutcomeSampler::new(&exact_distribution(&sv));
        for _ in 0..*count {
            let mut b = sampler.draw(rng);
            if flip > 0.0 {
                for q in 0..n {
                    if rng.random_bool(flip) {
                        b ^= 1 << q;
                    }
                }
            }
            *counts.entry(b).or_insert(0) += 1;
        }
    }
    Ok(OutcomeDistribution::from_counts(n, &counts, shots))
}
