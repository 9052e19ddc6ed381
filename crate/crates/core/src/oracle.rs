//! Test cases, compact program specifications and the expectation-value
//! oracle.
//!
//! A test case is a weighted sum of commuting Z-diagonal Pauli strings. The
//! specification records the outcome distribution measured for a single
//! designated string of the family; since every member of the Z family is
//! diagonal in the computational basis, that distribution determines the
//! expected expectation of any test case drawn from the family.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::{exact_distribution, simulate_with, Circuit, OutcomeDistribution, SimConfig};
use crate::error::{Error, Result};
use crate::pauli::{commutes, parity_sign, z_family, PauliFamily, PauliString};

/// Most terms a test case may hold.
pub const MAX_TERMS: usize = 32;

/// Default bound on |coefficient|.
pub const DEFAULT_COEFF_BOUND: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub pauli: PauliString,
    pub coeff: f64,
}

/// Weighted sum of distinct, pairwise-commuting Pauli strings. May be empty:
/// an all-zero selection decodes to the empty sum.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestCase {
    terms: Vec<Term>,
}

impl TestCase {
    pub fn new(terms: Vec<Term>) -> Result<TestCase> {
        TestCase::with_bound(terms, DEFAULT_COEFF_BOUND)
    }

    pub fn with_bound(terms: Vec<Term>, coeff_bound: f64) -> Result<TestCase> {
        if terms.len() > MAX_TERMS {
            return Err(Error::InvalidTestCase(format!(
                "{} terms exceed the maximum of {MAX_TERMS}",
                terms.len()
            )));
        }
        for (i, t) in terms.iter().enumerate() {
            if !t.coeff.is_finite() || t.coeff.abs() > coeff_bound {
                return Err(Error::InvalidTestCase(format!(
                    "coefficient {} of {} outside [-{coeff_bound}, {coeff_bound}]",
                    t.coeff, t.pauli
                )));
            }
            for u in &terms[i + 1..] {
                if t.pauli == u.pauli {
                    return Err(Error::InvalidTestCase(format!("duplicate term {}", t.pauli)));
                }
                if !commutes(&t.pauli, &u.pauli)? {
                    return Err(Error::InvalidTestCase(format!(
                        "{} and {} do not commute",
                        t.pauli, u.pauli
                    )));
                }
            }
        }
        Ok(TestCase { terms })
    }

    /// Skips validation; callers guarantee distinct commuting terms.
    pub(crate) fn from_terms_unchecked(terms: Vec<Term>) -> TestCase {
        TestCase { terms }
    }

    /// Parses `(pauli, coeff)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<TestCase> {
        let terms = pairs
            .into_iter()
            .map(|(s, coeff)| Ok(Term { pauli: s.parse()?, coeff }))
            .collect::<Result<Vec<_>>>()?;
        TestCase::new(terms)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σ|c_i|, the bound on any expectation of this test case.
    pub fn l1_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }
}

/// Compact program specification: the expected outcome distribution of the
/// designated string of one family.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactSpec {
    pub circuit_name: String,
    pub family: PauliFamily,
    pub designated: PauliString,
    pub outcomes: OutcomeDistribution,
}

impl CompactSpec {
    pub fn new(
        circuit_name: impl Into<String>,
        family: PauliFamily,
        designated: PauliString,
        outcomes: OutcomeDistribution,
    ) -> Result<CompactSpec> {
        if !family.contains(&designated) {
            return Err(Error::OutsideFamily(designated.to_string()));
        }
        if outcomes.n_qubits() != family.n_qubits() {
            return Err(Error::LengthMismatch { expected: family.n_qubits(), found: outcomes.n_qubits() });
        }
        let total = outcomes.total();
        if !outcomes.is_empty() && (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("specified outcomes sum to {total}, expected 1")));
        }
        Ok(CompactSpec { circuit_name: circuit_name.into(), family, designated, outcomes })
    }

    pub fn n_qubits(&self) -> usize {
        self.family.n_qubits()
    }

    pub fn to_json(&self) -> Result<String> {
        let file = SpecFile {
            circuit: self.circuit_name.clone(),
            family: "Z".into(),
            designated: self.designated.to_string(),
            outcomes: self.outcomes.rendered(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<CompactSpec> {
        let file: SpecFile = serde_json::from_str(text)?;
        if file.family != "Z" {
            return Err(Error::InvalidConfig(format!("unsupported family `{}`", file.family)));
        }
        let designated: PauliString = file.designated.parse()?;
        let n = designated.len();
        let outcomes =
            OutcomeDistribution::from_rendered(n, file.outcomes.iter().map(|(k, v)| (k.as_str(), *v)))?;
        CompactSpec::new(file.circuit, z_family(n), designated, outcomes)
    }

    pub fn load(path: &Path) -> Result<CompactSpec> {
        CompactSpec::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SpecFile {
    circuit: String,
    family: String,
    designated: String,
    outcomes: BTreeMap<String, f64>,
}

/// Outcome of one fitness evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessRecord {
    pub exp: f64,
    pub obs: f64,
    pub fitness: f64,
    pub evaluations_consumed: u64,
}

impl FitnessRecord {
    pub fn new(exp: f64, obs: f64, evaluations_consumed: u64) -> FitnessRecord {
        FitnessRecord { exp, obs, fitness: (exp - obs).abs(), evaluations_consumed }
    }
}

fn check_term(p: &PauliString, spec: &CompactSpec) -> Result<()> {
    if p.len() != spec.n_qubits() {
        return Err(Error::LengthMismatch { expected: spec.n_qubits(), found: p.len() });
    }
    if !spec.family.contains(p) || !p.is_diagonal() || !commutes(p, &spec.designated)? {
        return Err(Error::OutsideFamily(p.to_string()));
    }
    Ok(())
}

/// Expected expectation of `test` under the specification:
/// Exp = Σ_{(i,j)} c_i · e_i(b_j) · M(b_j), one flat sum over every
/// (term, specified outcome) pair.
pub fn expected_expectation(test: &TestCase, spec: &CompactSpec) -> Result<f64> {
    if spec.outcomes.is_empty() {
        return Err(Error::EmptySpec);
    }
    for t in test.terms() {
        check_term(&t.pauli, spec)?;
    }
    let exp = test
        .terms()
        .iter()
        .flat_map(|t| spec.outcomes.iter().map(move |(b, m)| (t, b, m)))
        .map(|(t, b, m)| t.coeff * parity_sign(t.pauli.z_mask(), b) * m)
        .sum();
    Ok(exp)
}

/// Expectation of a single diagonal string under `dist`.
pub fn string_expectation(p: &PauliString, dist: &OutcomeDistribution) -> Result<f64> {
    if p.len() != dist.n_qubits() {
        return Err(Error::LengthMismatch { expected: dist.n_qubits(), found: p.len() });
    }
    if !p.is_diagonal() {
        return Err(Error::NonDiagonal(p.to_string()));
    }
    let mask = p.z_mask();
    Ok(dist.iter().map(|(b, prob)| parity_sign(mask, b) * prob).sum())
}

/// Observed expectation Σ_i c_i Σ_b e_i(b)·P(b) of `test` over an executed
/// outcome distribution.
pub fn observed_expectation(test: &TestCase, dist: &OutcomeDistribution) -> Result<f64> {
    test.terms()
        .iter()
        .map(|t| Ok(t.coeff * string_expectation(&t.pauli, dist)?))
        .sum()
}

/// |Exp − Obs| for `test` against `spec`, with `dist` as the execution result.
pub fn fitness(test: &TestCase, spec: &CompactSpec, dist: &OutcomeDistribution) -> Result<FitnessRecord> {
    let exp = expected_expectation(test, spec)?;
    let obs = observed_expectation(test, dist)?;
    Ok(FitnessRecord::new(exp, obs, 1))
}

/// Builds the specification from an exact simulation of `circuit`, with the
/// all-Z string as the designated member of the Z family.
pub fn derive_spec(circuit: &Circuit, config: &SimConfig) -> Result<CompactSpec> {
    let sv = simulate_with(circuit, config)?;
    let n = circuit.n_qubits();
    CompactSpec::new(circuit.name(), z_family(n), PauliString::all_z(n), exact_distribution(&sv))
}

/// Per-string expectations over a fixed distribution, memoised so repeated
/// test cases over the same strings cost one pass per string.
#[derive(Debug, Clone)]
pub struct ExpectationTable {
    dist: OutcomeDistribution,
    values: HashMap<PauliString, f64>,
}

impl ExpectationTable {
    pub fn new(dist: OutcomeDistribution) -> ExpectationTable {
        ExpectationTable { dist, values: HashMap::new() }
    }

    pub fn distribution(&self) -> &OutcomeDistribution {
        &self.dist
    }

    pub fn preload<'a>(&mut self, strings: impl IntoIterator<Item = &'a PauliString>) -> Result<()> {
        for p in strings {
            if !self.values.contains_key(p) {
                let v = string_expectation(p, &self.dist)?;
                self.values.insert(*p, v);
            }
        }
        Ok(())
    }

    /// Σ c_i E_i, computing any missing E_i on the fly.
    pub fn expectation(&self, test: &TestCase) -> Result<f64> {
        test.terms()
            .iter()
            .map(|t| {
                let e = match self.values.get(&t.pauli) {
                    Some(&e) => e,
                    None => string_expectation(&t.pauli, &self.dist)?,
                };
                Ok(t.coeff * e)
            })
            .sum()
    }
}
