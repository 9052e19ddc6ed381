use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, SimConfig};
use crate::error::{Error, Result};
use crate::oracle::{observed_expectation, TestCase};

use super::{channel_distribution, noisy_sample, NoiseModel, Shots};

/// How noise is amplified between extrapolation points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZneMode {
    /// Scaling for exact-channel evaluation, folding for sampled.
    #[default]
    Auto,
    /// Multiply channel probabilities by the factor.
    Scaling,
    /// Insert G†G pairs after gates until the gate count grows by the factor.
    Folding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZneConfig {
    pub scale_factors: Vec<f64>,
    /// Requested degree; the fit uses at most `scale_factors.len() - 1`.
    pub degree: usize,
    pub mode: ZneMode,
}

impl Default for ZneConfig {
    fn default() -> ZneConfig {
        ZneConfig { scale_factors: vec![1.0, 2.0, 3.0], degree: 3, mode: ZneMode::Auto }
    }
}

impl ZneConfig {
    pub fn validate(&self) -> Result<()> {
        let f = &self.scale_factors;
        if f.first() != Some(&1.0) {
            return Err(Error::InvalidConfig("scale factors must start at 1.0".into()));
        }
        if f.windows(2).any(|w| !(w[1] > w[0])) || f.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("scale factors must be finite and strictly increasing".into()));
        }
        Ok(())
    }

    pub fn effective_degree(&self) -> usize {
        self.degree.min(self.scale_factors.len().saturating_sub(1))
    }

    pub fn resolved_mode(&self, shots: Shots) -> ZneMode {
        match (self.mode, shots) {
            (ZneMode::Auto, Shots::Exact) => ZneMode::Scaling,
            (ZneMode::Auto, Shots::Count(_)) => ZneMode::Folding,
            (m, _) => m,
        }
    }
}

/// Weights w with Σ w_i·y_i equal to the least-squares polynomial of
/// `degree` through (factors_i, y_i), evaluated at zero.
pub fn extrapolation_weights(factors: &[f64], degree: usize) -> Result<Vec<f64>> {
    if factors.is_empty() || degree >= factors.len() {
        return Err(Error::InvalidConfig(format!(
            "degree {degree} needs more than {} scale factors",
            factors.len()
        )));
    }
    let v = DMatrix::from_fn(factors.len(), degree + 1, |i, j| factors[i].powi(j as i32));
    let pinv = v.pseudo_inverse(1e-14).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(pinv.row(0).iter().copied().collect())
}

pub fn extrapolate(factors: &[f64], values: &[f64], degree: usize) -> Result<f64> {
    if factors.len() != values.len() {
        return Err(Error::LengthMismatch { expected: factors.len(), found: values.len() });
    }
    let w = extrapolation_weights(factors, degree)?;
    Ok(w.iter().zip(values).map(|(w, y)| w * y).sum())
}

/// Gate folding: appends G†·G after gates so the gate count grows from d to
/// about `factor`·d. Whole folds go to every gate, the remainder to the
/// leftmost gates.
pub fn fold_circuit(c: &Circuit, factor: f64) -> Result<Circuit> {
    if !(factor >= 1.0) || !factor.is_finite() {
        return Err(Error::InvalidConfig(format!("fold factor {factor} must be ≥ 1")));
    }
    let d = c.len();
    if d == 0 {
        return Ok(c.clone());
    }
    let extra = (d as f64 * (factor - 1.0) / 2.0).round() as usize;
    let (whole, rest) = (extra / d, extra % d);
    let mut gates = Vec::with_capacity(d + 2 * extra);
    for (i, g) in c.gates().iter().enumerate() {
        gates.push(*g);
        for _ in 0..whole + usize::from(i < rest) {
            gates.push(g.inverse());
            gates.push(*g);
        }
    }
    Circuit::from_gates(c.n_qubits(), c.name(), gates)
}

/// Noise level `factor` of `c` under `model`, in the resolved mode.
pub(crate) fn amplified(c: &Circuit, model: &NoiseModel, factor: f64, mode: ZneMode) -> Result<(Circuit, NoiseModel)> {
    match mode {
        ZneMode::Folding => Ok((fold_circuit(c, factor)?, *model)),
        _ => Ok((c.clone(), model.scaled(factor))),
    }
}

/// Zero-noise extrapolated expectation of `test` on `c`.
pub fn zne_expectation<R: Rng + ?Sized>(
    test: &TestCase,
    c: &Circuit,
    model: &NoiseModel,
    zne: &ZneConfig,
    shots: Shots,
    rng: &mut R,
    config: &SimConfig,
) -> Result<f64> {
    zne.validate()?;
    let mode = zne.resolved_mode(shots);
    let mut values = Vec::with_capacity(zne.scale_factors.len());
    for &factor in &zne.scale_factors {
        let (circuit, level) = amplified(c, model, factor, mode)?;
        let dist = match shots {
            Shots::Exact => channel_distribution(&circuit, &level)?,
            Shots::Count(s) => noisy_sample(&circuit, &level, s, rng, config)?,
        };
        values.push(observed_expectation(test, &dist)?);
    }
    extrapolate(&zne.scale_factors, &values, zne.effective_degree())
}
