use rand::seq::index;
use rand::Rng;

use crate::oracle::{TestCase, Term, MAX_TERMS};
use crate::pauli::{PauliFamily, PauliString};
use crate::seed::rng_from;

/// Fixed-length candidate: a selection bit and a weight per pool slot.
/// Flattened, the array reads `[bits..., weights...]` with length
/// `2 · min(|F|, 32)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub select: Vec<bool>,
    pub weights: Vec<f64>,
}

impl Candidate {
    /// Uniform candidate: Bernoulli(½) bits, weights uniform in ±`bound`.
    pub fn random<R: Rng + ?Sized>(slots: usize, bound: f64, rng: &mut R) -> Candidate {
        let select = (0..slots).map(|_| rng.random_bool(0.5)).collect();
        let weights = (0..slots).map(|_| rng.random_range(-bound..=bound)).collect();
        Candidate { select, weights }
    }

    pub fn slots(&self) -> usize {
        self.select.len()
    }

    /// The flat linear array, selection half first.
    pub fn to_array(&self) -> Vec<f64> {
        self.select
            .iter()
            .map(|&b| if b { 1.0 } else { 0.0 })
            .chain(self.weights.iter().copied())
            .collect()
    }

    /// Splits a flat array in half; selection entries ≥ 0.5 count as set.
    pub fn from_array(values: &[f64]) -> Option<Candidate> {
        if !values.len().is_multiple_of(2) {
            return None;
        }
        let (bits, weights) = values.split_at(values.len() / 2);
        Some(Candidate { select: bits.iter().map(|&v| v >= 0.5).collect(), weights: weights.to_vec() })
    }
}

/// The family members addressed by candidate slots for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct StringPool {
    strings: Vec<PauliString>,
    seed: u64,
}

impl StringPool {
    /// Small families are used whole, in index order. Families larger than
    /// 32 contribute `designated` plus 31 other members drawn uniformly
    /// without replacement from `seed`, kept in family index order.
    pub fn draw(family: &PauliFamily, designated: &PauliString, seed: u64) -> StringPool {
        let size = family.len();
        if size <= MAX_TERMS as u64 {
            return StringPool { strings: family.iter().collect(), seed };
        }
        let anchor = family_index(family, designated).expect("designated string belongs to the family");
        let mut rng = rng_from(seed);
        let mut picks: Vec<u64> = index::sample(&mut rng, (size - 1) as usize, MAX_TERMS - 1)
            .into_iter()
            .map(|k| {
                let k = k as u64;
                if k >= anchor {
                    k + 1
                } else {
                    k
                }
            })
            .collect();
        picks.push(anchor);
        picks.sort_unstable();
        let strings = picks.into_iter().map(|k| family.member(k).expect("index in range")).collect();
        StringPool { strings, seed }
    }

    pub fn from_strings(strings: Vec<PauliString>, seed: u64) -> StringPool {
        StringPool { strings, seed }
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn family_index(family: &PauliFamily, p: &PauliString) -> Option<u64> {
    if !family.contains(p) {
        return None;
    }
    if family.is_z_family() {
        return Some(p.z_mask());
    }
    family.iter().position(|m| m == *p).map(|i| i as u64)
}

/// Test case holding `(pool[i], weights[i])` for every selected slot.
pub fn decode(candidate: &Candidate, pool: &StringPool) -> TestCase {
    debug_assert_eq!(candidate.slots(), pool.len());
    let terms = candidate
        .select
        .iter()
        .zip(&candidate.weights)
        .zip(pool.strings())
        .filter(|((&on, _), _)| on)
        .map(|((_, &coeff), &pauli)| Term { pauli, coeff })
        .collect();
    TestCase::from_terms_unchecked(terms)
}

/// Inverse of [`decode`] for test cases built from pool strings; unselected
/// slots get weight zero.
pub fn encode(test: &TestCase, pool: &StringPool) -> Option<Candidate> {
    let mut cand = Candidate { select: vec![false; pool.len()], weights: vec![0.0; pool.len()] };
    for t in test.terms() {
        let slot = pool.strings().iter().position(|s| *s == t.pauli)?;
        cand.select[slot] = true;
        cand.weights[slot] = t.coeff;
    }
    Some(cand)
}
