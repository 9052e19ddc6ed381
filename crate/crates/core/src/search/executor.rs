use std::sync::atomic::{AtomicU64, Ordering};

use crate::circuit::{exact_distribution, sample, simulate_with, Circuit, OutcomeDistribution, SimConfig, StateVector};
use crate::error::Result;
use crate::oracle::{observed_expectation, ExpectationTable, TestCase};
use crate::seed::substream;

use super::StringPool;

/// Produces the observed expectation of a test case on the circuit under
/// test. `evaluation` is the zero-based index of the fitness evaluation and
/// selects the random sub-stream of sampled executors.
pub trait Executor: Sync {
    fn prepare(&mut self, pool: &StringPool) -> Result<()> {
        let _ = pool;
        Ok(())
    }

    fn observe(&self, test: &TestCase, evaluation: u64) -> Result<f64>;
}

/// Noiseless, infinite-shot execution. The distribution is computed once.
#[derive(Debug, Clone)]
pub struct ExactExecutor {
    table: ExpectationTable,
}

impl ExactExecutor {
    pub fn new(cut: &Circuit, config: &SimConfig) -> Result<ExactExecutor> {
        let sv = simulate_with(cut, config)?;
        Ok(ExactExecutor { table: ExpectationTable::new(exact_distribution(&sv)) })
    }

    pub fn from_distribution(dist: OutcomeDistribution) -> ExactExecutor {
        ExactExecutor { table: ExpectationTable::new(dist) }
    }

    pub fn distribution(&self) -> &OutcomeDistribution {
        self.table.distribution()
    }
}

impl Executor for ExactExecutor {
    fn prepare(&mut self, pool: &StringPool) -> Result<()> {
        self.table.preload(pool.strings())
    }

    fn observe(&self, test: &TestCase, _evaluation: u64) -> Result<f64> {
        self.table.expectation(test)
    }
}

/// Finite-shot execution: every evaluation re-samples `shots` outcomes from
/// its own sub-stream of `seed`.
#[derive(Debug, Clone)]
pub struct SampledExecutor {
    state: StateVector,
    shots: u64,
    seed: u64,
}

impl SampledExecutor {
    pub fn new(cut: &Circuit, shots: u64, seed: u64, config: &SimConfig) -> Result<SampledExecutor> {
        if shots == 0 {
            return Err(crate::Error::InvalidConfig("shots must be at least 1".into()));
        }
        Ok(SampledExecutor { state: simulate_with(cut, config)?, shots, seed })
    }
}

impl Executor for SampledExecutor {
    fn observe(&self, test: &TestCase, evaluation: u64) -> Result<f64> {
        let mut rng = substream(self.seed, &[evaluation]);
        let dist = sample(&self.state, self.shots, &mut rng);
        observed_expectation(test, &dist)
    }
}

/// Wraps any function producing an outcome distribution per evaluation and
/// counts how often it ran.
pub struct DistributionExecutor<F> {
    run: F,
    calls: AtomicU64,
}

impl<F> DistributionExecutor<F>
where
    F: Fn(u64) -> Result<OutcomeDistribution> + Sync,
{
    pub fn new(run: F) -> Self {
        DistributionExecutor { run, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<F> Executor for DistributionExecutor<F>
where
    F: Fn(u64) -> Result<OutcomeDistribution> + Sync,
{
    fn observe(&self, test: &TestCase, evaluation: u64) -> Result<f64> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        observed_expectation(test, &(self.run)(evaluation)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::oracle::derive_spec;
    use crate::search::{run_search, SearchConfig};

    #[test]
    fn closure_executor_runs_once_per_evaluation() {
        let cut = Circuit::from_gates(2, "bell", vec![Gate::h(0), Gate::cx(0, 1)]).unwrap();
        let spec = derive_spec(&cut, &SimConfig::default()).unwrap();
        let dist = spec.outcomes.clone();
        let mut ex = DistributionExecutor::new(move |_| Ok(dist.clone()));
        let r = run_search(&cut, &spec, &SearchConfig::default(), &mut ex).unwrap();
        assert_eq!(ex.calls(), r.evaluations_used);
    }

    #[test]
    fn sampled_is_reproducible_per_evaluation() {
        let cut = Circuit::from_gates(2, "bell", vec![Gate::h(0), Gate::cx(0, 1)]).unwrap();
        let ex = SampledExecutor::new(&cut, 1000, 5, &SimConfig::default()).unwrap();
        let t = TestCase::from_pairs([("IZ", 1.0)]).unwrap();
        assert_eq!(ex.observe(&t, 3).unwrap(), ex.observe(&t, 3).unwrap());
        assert_ne!(ex.observe(&t, 3).unwrap(), ex.observe(&t, 4).unwrap());
        assert!(ex.observe(&t, 0).unwrap().abs() < 0.15);
    }
}
