use std::collections::BTreeMap;

use rand::Rng;

use super::StateVector;
use crate::error::{Error, Result};

/// Exact distributions drop entries below this probability.
pub const SPARSITY_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Exact,
    Sampled(u64),
}

/// Sparse probability distribution over n-bit outcomes, keyed by outcome
/// index (qubit 0 = least significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    n_qubits: usize,
    probs: BTreeMap<u64, f64>,
    source: Source,
}

impl OutcomeDistribution {
    /// Exact distribution from (outcome, probability) pairs; entries below
    /// the sparsity floor are dropped.
    pub fn from_probabilities(
        n_qubits: usize,
        entries: impl IntoIterator<Item = (u64, f64)>,
    ) -> OutcomeDistribution {
        let probs = entries.into_iter().filter(|&(_, p)| p >= SPARSITY_FLOOR).collect();
        OutcomeDistribution { n_qubits, probs, source: Source::Exact }
    }

    pub fn from_counts(n_qubits: usize, counts: &BTreeMap<u64, u64>, shots: u64) -> OutcomeDistribution {
        let probs = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&b, &c)| (b, c as f64 / shots as f64))
            .collect();
        OutcomeDistribution { n_qubits, probs, source: Source::Sampled(shots) }
    }

    /// Parses `{bitstring: probability}` pairs rendered most-significant
    /// qubit first. Values must be probabilities.
    pub fn from_rendered<'a>(
        n_qubits: usize,
        entries: impl IntoIterator<Item = (&'a str, f64)>,
    ) -> Result<OutcomeDistribution> {
        let mut probs = BTreeMap::new();
        for (bits, p) in entries {
            if bits.len() != n_qubits || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::InvalidConfig(format!(
                    "outcome `{bits}` is not a {n_qubits}-bit string"
                )));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidConfig(format!("probability {p} of `{bits}` outside [0,1]")));
            }
            let b = u64::from_str_radix(bits, 2).expect("validated bitstring");
            if probs.insert(b, p).is_some() {
                return Err(Error::InvalidConfig(format!("duplicate outcome `{bits}`")));
            }
        }
        Ok(OutcomeDistribution { n_qubits, probs, source: Source::Exact })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn prob(&self, outcome: u64) -> f64 {
        self.probs.get(&outcome).copied().unwrap_or(0.0)
    }

    /// Entries in ascending outcome order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.probs.iter().map(|(&b, &p)| (b, p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Bitstring for `outcome`, highest-index qubit leftmost.
    pub fn render(&self, outcome: u64) -> String {
        render_outcome(outcome, self.n_qubits)
    }

    pub fn rendered(&self) -> BTreeMap<String, f64> {
        self.iter().map(|(b, p)| (self.render(b), p)).collect()
    }

    /// Total-variation distance to another distribution over the same register.
    pub fn total_variation(&self, other: &OutcomeDistribution) -> f64 {
        let mut keys: Vec<u64> = self.probs.keys().chain(other.probs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        0.5 * keys.iter().map(|&b| (self.prob(b) - other.prob(b)).abs()).sum::<f64>()
    }
}

pub(crate) fn render_outcome(outcome: u64, n_qubits: usize) -> String {
    format!("{outcome:0n_qubits$b}")
}

/// Inverse-CDF sampler over a fixed distribution.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    outcomes: Vec<u64>,
    cumulative: Vec<f64>,
}

impl OutcomeSampler {
    pub fn new(dist: &OutcomeDistribution) -> OutcomeSampler {
        let mut acc = 0.0;
        let (outcomes, cumulative) = dist
            .iter()
            .map(|(b, p)| {
                acc += p;
                (b, acc)
            })
            .unzip();
        OutcomeSampler { outcomes, cumulative }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let total = *self.cumulative.last().expect("non-empty distribution");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        self.outcomes[idx.min(self.outcomes.len() - 1)]
    }
}

/// Multinomial draw of `shots` outcomes from the exact distribution of `sv`.
///
/// # Panics
/// If `shots` is zero.
pub fn sample<R: Rng + ?Sized>(sv: &StateVector, shots: u64, rng: &mut R) -> OutcomeDistribution {
    assert!(shots >= 1, "at least one shot is required");
    let exact = super::exact_distribution(sv);
    let sampler = OutcomeSampler::new(&exact);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(sampler.draw(rng)).or_insert(0) += 1;
    }
    OutcomeDistribution::from_counts(sv.n_qubits(), &counts, shots)
}
