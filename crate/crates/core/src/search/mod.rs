//! Candidate encoding and the four search strategies.
//!
//! Every strategy maximizes |Exp − Obs| under a hard budget of fitness
//! evaluations and stops at the first candidate whose fitness exceeds the
//! threshold.

mod encoding;
mod executor;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::oracle::{CompactSpec, ExpectationTable, FitnessRecord, TestCase, DEFAULT_COEFF_BOUND};
use crate::seed::{derive_seed, rng_from, Rng as SeedRng};

pub use encoding::{decode, encode, Candidate, StringPool};
pub use executor::{DistributionExecutor, ExactExecutor, Executor, SampledExecutor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "RS")]
    Rs,
    #[serde(rename = "GA")]
    Ga,
    #[serde(rename = "HC")]
    Hc,
    #[serde(rename = "EA")]
    OnePlusOneEa,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Rs, Strategy::Ga, Strategy::Hc, Strategy::OnePlusOneEa];

    pub fn label(self) -> &'static str {
        match self {
            Strategy::Rs => "RS",
            Strategy::Ga => "GA",
            Strategy::Hc => "HC",
            Strategy::OnePlusOneEa => "EA",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s.to_ascii_lowercase().as_str() {
            "rs" | "random" => Ok(Strategy::Rs),
            "ga" => Ok(Strategy::Ga),
            "hc" => Ok(Strategy::Hc),
            "ea" | "1+1" | "(1+1)ea" | "oneplusone" | "oneplusoneea" => Ok(Strategy::OnePlusOneEa),
            _ => Err(Error::InvalidConfig(format!("unknown strategy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub budget: u64,
    /// `None` disables early termination.
    pub threshold: Option<f64>,
    pub ga_population: usize,
    pub ga_generations: usize,
    pub seed: u64,
    /// Seed of the string pool; derived from `seed` when absent.
    pub pool_seed: Option<u64>,
    pub mutation_sigma: f64,
    /// Per-gene mutation rate; `None` means 1/L.
    pub mutation_rate: Option<f64>,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub elitism: usize,
    pub coeff_bound: f64,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig {
            strategy: Strategy::OnePlusOneEa,
            budget: 140,
            threshold: Some(0.01),
            ga_population: 40,
            ga_generations: 10,
            seed: 0,
            pool_seed: None,
            mutation_sigma: 0.1,
            mutation_rate: None,
            tournament_size: 2,
            crossover_rate: 0.9,
            elitism: 1,
            coeff_bound: DEFAULT_COEFF_BOUND,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.budget < 1 {
            return bad("budget must be at least 1");
        }
        if let Some(t) = self.threshold {
            if !(t >= 0.0) {
                return bad("threshold must be nonnegative");
            }
        }
        if self.ga_population < 1 || self.ga_generations < 1 {
            return bad("GA population and generations must be at least 1");
        }
        if self.tournament_size < 1 {
            return bad("tournament size must be at least 1");
        }
        if self.elitism > self.ga_population {
            return bad("elitism exceeds the population");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad("crossover rate outside [0, 1]");
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return bad("mutation rate outside [0, 1]");
            }
        }
        if !(self.mutation_sigma >= 0.0) || !self.mutation_sigma.is_finite() {
            return bad("mutation sigma must be finite and nonnegative");
        }
        if !(self.coeff_bound > 0.0) || !self.coeff_bound.is_finite() {
            return bad("coefficient bound must be positive");
        }
        Ok(())
    }

    pub fn effective_pool_seed(&self) -> u64 {
        self.pool_seed.unwrap_or_else(|| derive_seed(self.seed, &[0x706f_6f6c]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Best {
    pub candidate: Candidate,
    pub test: TestCase,
    pub record: FitnessRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub strategy: Strategy,
    pub seed: u64,
    pub pool_seed: u64,
    pub best: Best,
    pub detected: bool,
    pub evaluations_used: u64,
    /// Best-so-far fitness after each evaluation.
    pub history: Vec<f64>,
}

impl SearchResult {
    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .best
            .test
            .terms()
            .iter()
            .map(|t| json!({"pauli": t.pauli.to_string(), "coeff": t.coeff}))
            .collect();
        json!({
            "strategy": self.strategy,
            "seed": self.seed,
            "detected": self.detected,
            "evaluations_used": self.evaluations_used,
            "best": {
                "fitness": self.best.record.fitness,
                "exp": self.best.record.exp,
                "obs": self.best.record.obs,
                "terms": terms,
            },
            "pool_seed": self.pool_seed,
            "history": self.history,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value())?)
    }
}

/// Groups consecutive evaluations and reports the running maximum at the end
/// of each group; a trailing partial group still yields a point.
pub fn generation_aggregate(history: &[f64], group: usize) -> Vec<f64> {
    assert!(group >= 1, "group must be at least 1");
    let mut best = f64::NEG_INFINITY;
    history
        .chunks(group)
        .map(|chunk| {
            best = chunk.iter().copied().fold(best, f64::max);
            best
        })
        .collect()
}

struct Run<'a, E: Executor + ?Sized> {
    cfg: &'a SearchConfig,
    pool: &'a StringPool,
    spec: &'a ExpectationTable,
    executor: &'a E,
    rng: SeedRng,
    used: u64,
    best: Option<Best>,
    history: Vec<f64>,
    detected: bool,
}

impl<E: Executor + ?Sized> Run<'_, E> {
    fn exhausted(&self) -> bool {
        self.detected || self.used >= self.cfg.budget
    }

    fn evaluate(&mut self, cand: &Candidate) -> Result<f64> {
        let test = decode(cand, self.pool);
        let exp = self.spec.expectation(&test)?;
        let obs = self.executor.observe(&test, self.used)?;
        self.used += 1;
        let record = FitnessRecord::new(exp, obs, self.used);
        let f = record.fitness;
        if self.best.as_ref().is_none_or(|b| f > b.record.fitness) {
            self.best = Some(Best { candidate: cand.clone(), test, record });
        }
        self.history.push(self.best.as_ref().map_or(f, |b| b.record.fitness));
        if self.cfg.threshold.is_some_and(|t| f > t) {
            self.detected = true;
        }
        Ok(f)
    }

    fn random(&mut self) -> Candidate {
        Candidate::random(self.pool.len(), self.cfg.coeff_bound, &mut self.rng)
    }

    fn perturb(&mut self, w: f64) -> f64 {
        let bound = self.cfg.coeff_bound;
        let noise = if self.cfg.mutation_sigma > 0.0 {
            Normal::new(0.0, self.cfg.mutation_sigma).expect("valid sigma").sample(&mut self.rng)
        } else {
            0.0
        };
        (w + noise).clamp(-bound, bound)
    }

    fn mutate(&mut self, cand: &Candidate) -> Candidate {
        let slots = cand.slots();
        let rate = self.cfg.mutation_rate.unwrap_or(1.0 / slots.max(1) as f64);
        let mut out = cand.clone();
        if rate == 0.0 {
            return out;
        }
        for i in 0..slots {
            if self.rng.random_bool(rate) {
                out.select[i] = !out.select[i];
            }
        }
        for i in 0..slots {
            if self.rng.random_bool(rate) {
                out.weights[i] = self.perturb(out.weights[i]);
            }
        }
        out
    }

    fn neighbor(&mut self, cand: &Candidate) -> Candidate {
        let mut out = cand.clone();
        let i = self.rng.random_range(0..cand.slots());
        if self.rng.random_bool(0.5) {
            out.select[i] = !out.select[i];
        } else {
            out.weights[i] = self.perturb(out.weights[i]);
        }
        out
    }

    fn random_search(&mut self) -> Result<()> {
        while !self.exhausted() {
            let c = self.random();
            self.evaluate(&c)?;
        }
        Ok(())
    }

    /// Shared loop of HC and the (1+1) EA: accept non-worsening moves.
    fn local_search(&mut self, step: fn(&mut Self, &Candidate) -> Candidate) -> Result<()> {
        let mut current = self.random();
        let mut current_fit = self.evaluate(&current)?;
        while !self.exhausted() {
            let next = step(self, &current);
            let f = self.evaluate(&next)?;
            if f >= current_fit {
                current = next;
                current_fit = f;
            }
        }
        Ok(())
    }

    fn tournament<'p>(&mut self, pop: &'p [(Candidate, f64)]) -> &'p Candidate {
        let mut pick = self.rng.random_range(0..pop.len());
        for _ in 1..self.cfg.tournament_size {
            let other = self.rng.random_range(0..pop.len());
            if pop[other].1 > pop[pick].1 {
                pick = other;
            }
        }
        &pop[pick].0
    }

    fn crossover(&mut self, a: &Candidate, b: &Candidate) -> Candidate {
        let mut child = a.clone();
        for i in 0..a.slots() {
            if self.rng.random_bool(0.5) {
                child.select[i] = b.select[i];
                child.weights[i] = b.weights[i];
            }
        }
        child
    }

    fn genetic(&mut self) -> Result<()> {
        let size = self.cfg.ga_population;
        let mut pop = Vec::with_capacity(size);
        while pop.len() < size && !self.exhausted() {
            let c = self.random();
            let f = self.evaluate(&c)?;
            pop.push((c, f));
        }
        for _ in 1..self.cfg.ga_generations {
            if self.exhausted() {
                break;
            }
            let mut next = Vec::with_capacity(size);
            while next.len() < size && !self.exhausted() {
                let p1 = self.tournament(&pop).clone();
                let child = if self.rng.random_bool(self.cfg.crossover_rate) {
                    let p2 = self.tournament(&pop).clone();
                    self.crossover(&p1, &p2)
                } else {
                    p1
                };
                let child = self.mutate(&child);
                let f = self.evaluate(&child)?;
                next.push((child, f));
            }
            if next.len() < size {
                break;
            }
            pop.sort_by(|a, b| b.1.total_cmp(&a.1));
            next.sort_by(|a, b| b.1.total_cmp(&a.1));
            let keep = self.cfg.elitism;
            next.truncate(size - keep);
            next.extend(pop.drain(..keep));
            pop = next;
        }
        Ok(())
    }
}

/// Runs one search of `cfg.strategy` against `spec`, observing the circuit
/// through `executor`.
pub fn run_search<E: Executor + ?Sized>(
    cut: &Circuit,
    spec: &CompactSpec,
    cfg: &SearchConfig,
    executor: &mut E,
) -> Result<SearchResult> {
    cfg.validate()?;
    if spec.n_qubits() != cut.n_qubits() {
        return Err(Error::LengthMismatch { expected: cut.n_qubits(), found: spec.n_qubits() });
    }
    if spec.outcomes.is_empty() {
        return Err(Error::EmptySpec);
    }
    let pool_seed = cfg.effective_pool_seed();
    let pool = StringPool::draw(&spec.family, &spec.designated, pool_seed);
    let mut table = ExpectationTable::new(spec.outcomes.clone());
    table.preload(pool.strings())?;
    executor.prepare(&pool)?;

    let mut run = Run {
        cfg,
        pool: &pool,
        spec: &table,
        executor: &*executor,
        rng: rng_from(derive_seed(cfg.seed, &[cfg.strategy as u64])),
        used: 0,
        best: None,
        history: Vec::with_capacity(cfg.budget.min(1 << 16) as usize),
        detected: false,
    };
    match cfg.strategy {
        Strategy::Rs => run.random_search()?,
        Strategy::Hc => run.local_search(Run::neighbor)?,
        Strategy::OnePlusOneEa => run.local_search(Run::mutate)?,
        Strategy::Ga => run.genetic()?,
    }
    let best = run.best.expect("budget of at least one evaluation");
    Ok(SearchResult {
        strategy: cfg.strategy,
        seed: cfg.seed,
        pool_seed,
        detected: run.detected,
        evaluations_used: run.used,
        history: run.history,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Gate, SimConfig};
    use crate::oracle::derive_spec;

    fn ghz(n: usize) -> Circuit {
        let mut gates = vec![Gate::h(0)];
        gates.extend((1..n).map(|q| Gate::cx(q - 1, q)));
        Circuit::from_gates(n, "ghz", gates).unwrap()
    }

    fn faulty_ghz(n: usize) -> Circuit {
        let mut c = ghz(n);
        c.insert(1, Gate::ry(0.3, 1)).unwrap();
        c
    }

    fn search(cut: &Circuit, spec: &CompactSpec, cfg: &SearchConfig) -> SearchResult {
        let mut ex = ExactExecutor::new(cut, &SimConfig::default()).unwrap();
        run_search(cut, spec, cfg, &mut ex).unwrap()
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(generation_aggregate(&[0.1, 0.3, 0.2], 1), [0.1, 0.3, 0.3]);
        let h: Vec<f64> = (0..140).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(generation_aggregate(&h, 10).len(), 14);
        assert_eq!(generation_aggregate(&[0.4; 25], 10), [0.4; 3]);
    }

    #[test]
    fn fault_free_is_never_detected() {
        let c = ghz(5);
        let spec = derive_spec(&c, &SimConfig::default()).unwrap();
        for strategy in Strategy::ALL {
            let r = search(&c, &spec, &SearchConfig { strategy, ..Default::default() });
            assert!(!r.detected);
            assert!(r.best.record.fitness <= 1e-9);
            assert_eq!(r.evaluations_used, 140);
        }
    }

    #[test]
    fn faulty_ghz_detected_by_ea() {
        let spec = derive_spec(&ghz(5), &SimConfig::default()).unwrap();
        let cut = faulty_ghz(5);
        let hits = (0..20)
            .filter(|&seed| search(&cut, &spec, &SearchConfig { seed, ..Default::default() }).detected)
            .count();
        assert!(hits >= 18, "{hits}/20");
    }

    #[test]
    fn detection_stops_early_and_matches_threshold() {
        let spec = derive_spec(&ghz(3), &SimConfig::default()).unwrap();
        let cut = faulty_ghz(3);
        for strategy in Strategy::ALL {
            let r = search(&cut, &spec, &SearchConfig { strategy, seed: 4, ..Default::default() });
            assert_eq!(r.detected, r.best.record.fitness > 0.01);
            if r.detected {
                assert_eq!(r.best.record.evaluations_consumed, r.evaluations_used);
            }
        }
    }

    #[test]
    fn budget_without_threshold() {
        let spec = derive_spec(&ghz(4), &SimConfig::default()).unwrap();
        let cut = faulty_ghz(4);
        for strategy in Strategy::ALL {
            let cfg = SearchConfig { strategy, threshold: None, budget: 140, ..Default::default() };
            assert_eq!(search(&cut, &spec, &cfg).evaluations_used, 140);
            let cfg = SearchConfig { budget: 1000, ..cfg };
            let expect = if strategy == Strategy::Ga { 400 } else { 1000 };
            assert_eq!(search(&cut, &spec, &cfg).evaluations_used, expect);
        }
    }

    #[test]
    fn identity_mutation_keeps_best_constant() {
        let spec = derive_spec(&ghz(4), &SimConfig::default()).unwrap();
        let cut = faulty_ghz(4);
        let cfg = SearchConfig { mutation_rate: Some(0.0), threshold: None, ..Default::default() };
        let r = search(&cut, &spec, &cfg);
        assert!(r.history.iter().all(|&h| h == r.history[0]));
    }

    #[test]
    fn deterministic_json() {
        let spec = derive_spec(&ghz(6), &SimConfig::default()).unwrap();
        let cut = faulty_ghz(6);
        let cfg = SearchConfig { strategy: Strategy::Ga, seed: 9, ..Default::default() };
        let a = search(&cut, &spec, &cfg);
        assert_eq!(a, search(&cut, &spec, &cfg));
        let v: serde_json::Value = serde_json::from_str(&a.to_json().unwrap()).unwrap();
        assert_eq!(v["strategy"], "GA");
        assert_eq!(v["evaluations_used"], a.evaluations_used);
        assert_eq!(v["history"].as_array().unwrap().len() as u64, a.evaluations_used);
    }

    #[test]
    fn strategy_names_parse() {
        for s in Strategy::ALL {
            assert_eq!(s.label().parse::<Strategy>().unwrap(), s);
        }
        assert!("sa".parse::<Strategy>().is_err());
    }
}
