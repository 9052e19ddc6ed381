use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::TestCase;
use crate::pauli::PauliString;

/// Fault detection score: fraction of faults detected in one run.
pub fn fds(detections: &[bool]) -> f64 {
    if detections.is_empty() {
        return 0.0;
    }
    detections.iter().filter(|&&d| d).count() as f64 / detections.len() as f64
}

pub fn avg_fds(scores: &[f64]) -> f64 {
    mean(scores)
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn string_set(t: &TestCase) -> BTreeSet<PauliString> {
    t.terms().iter().map(|t| t.pauli).collect()
}

/// Jaccard similarity of the term strings of two test cases; −1 when both
/// are empty. Coefficients are ignored.
pub fn jaccard(a: &TestCase, b: &TestCase) -> f64 {
    let (a, b) = (string_set(a), string_set(b));
    let union = a.union(&b).count();
    if union == 0 {
        return -1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// Mean Jaccard similarity over all unordered pairs; `None` with fewer
/// than two test cases.
pub fn avg_sim(tests: &[TestCase]) -> Option<f64> {
    let n = tests.len();
    if n < 2 {
        return None;
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += jaccard(&tests[i], &tests[j]);
        }
    }
    Some(2.0 * total / (n * (n - 1)) as f64)
}

/// `steps` equally spaced values from `lo` to `hi` inclusive.
pub fn threshold_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(Error::InvalidConfig(format!("bad threshold grid {lo}:{hi}:{steps}")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { hi } else { lo + step * i as f64 }).collect())
}

/// Confusion counts and derived scores at one threshold. Scores are `None`
/// when their denominator is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Predicts "faulty" iff fitness > τ for every τ in `thresholds`.
/// `samples` holds (is_faulty, fitness) pairs.
pub fn classify(samples: &[(bool, f64)], thresholds: &[f64]) -> Vec<ClassRow> {
    thresholds
        .iter()
        .map(|&tau| {
            let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
            for &(faulty, fit) in samples {
                match (faulty, fit > tau) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    (false, false) => tn += 1,
                    (true, false) => fn_ += 1,
                }
            }
            // Undefined everywhere once nothing is predicted positive.
            let (precision, recall, f1) = if tp + fp == 0 {
                (None, None, None)
            } else {
                let p = tp as f64 / (tp + fp) as f64;
                let r = (tp + fn_ > 0).then(|| tp as f64 / (tp + fn_) as f64);
                let f1 = r.map(|r| if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 });
                (Some(p), r, f1)
            };
            ClassRow { threshold: tau, tp, fp, tn, fn_, precision, recall, f1 }
        })
        .collect()
}

/// Cliff's delta: (#{a > b} − #{a < b}) / (|a|·|b|).
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidConfig("Cliff's delta needs two nonempty samples".into()));
    }
    let mut score: i64 = 0;
    for x in a {
        for y in b {
            score += match x.partial_cmp(y) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    Ok(score as f64 / (a.len() * b.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn of(delta: f64) -> Magnitude {
        let d = delta.abs();
        if d < 0.147 {
            Magnitude::Negligible
        } else if d < 0.33 {
            Magnitude::Small
        } else if d < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Magnitude::Negligible => "Negligible",
            Magnitude::Small => "Small",
            Magnitude::Medium => "Medium",
            Magnitude::Large => "Large",
        })
    }
}
