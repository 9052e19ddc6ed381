use crate::circuit::{Circuit, SimConfig};
use crate::error::Result;
use crate::oracle::{observed_expectation, ExpectationTable, TestCase};
use crate::search::{Executor, StringPool};
use crate::seed::substream;

use super::zne::amplified;
use super::{channel_distribution, extrapolation_weights, noisy_sample, NoiseModel, Shots, ZneConfig};

/// Noisy execution, optionally mitigated by zero-noise extrapolation.
///
/// Each noise level is one (circuit, model) pair. In `Shots::Exact` mode the
/// level distributions are propagated once as density matrices; otherwise
/// every evaluation samples each level from its own sub-stream.
pub struct NoisyExecutor {
    levels: Vec<(Circuit, NoiseModel)>,
    weights: Vec<f64>,
    shots: Shots,
    seed: u64,
    config: SimConfig,
    tables: Vec<ExpectationTable>,
}

impl NoisyExecutor {
    pub fn new(
        cut: &Circuit,
        model: NoiseModel,
        shots: Shots,
        seed: u64,
        zne: Option<&ZneConfig>,
        config: SimConfig,
    ) -> Result<NoisyExecutor> {
        model.validate()?;
        if shots == Shots::Count(0) {
            return Err(crate::Error::InvalidConfig("shots must be at least 1".into()));
        }
        let (levels, weights) = match zne {
            None => (vec![(cut.clone(), model)], vec![1.0]),
            Some(z) => {
                z.validate()?;
                let mode = z.resolved_mode(shots);
                let levels = z
                    .scale_factors
                    .iter()
                    .map(|&f| amplified(cut, &model, f, mode))
                    .collect::<Result<Vec<_>>>()?;
                (levels, extrapolation_weights(&z.scale_factors, z.effective_degree())?)
            }
        };
        let tables = match shots {
            Shots::Exact => levels
                .iter()
                .map(|(c, m)| Ok(ExpectationTable::new(channel_distribution(c, m)?)))
                .collect::<Result<Vec<_>>>()?,
            Shots::Count(_) => Vec::new(),
        };
        Ok(NoisyExecutor { levels, weights, shots, seed, config, tables })
    }
}

impl Executor for NoisyExecutor {
    fn prepare(&mut self, pool: &StringPool) -> Result<()> {
        for t in &mut self.tables {
            t.preload(pool.strings())?;
        }
        Ok(())
    }

    fn observe(&self, test: &TestCase, evaluation: u64) -> Result<f64> {
        let mut total = 0.0;
        match self.shots {
            Shots::Exact => {
                for (table, w) in self.tables.iter().zip(&self.weights) {
                    total += w * table.expectation(test)?;
                }
            }
            Shots::Count(shots) => {
                let mut rng = substream(self.seed, &[evaluation]);
                for ((c, m), w) in self.levels.iter().zip(&self.weights) {
                    let dist = noisy_sample(c, m, shots, &mut rng, &self.config)?;
                    total += w * observed_expectation(test, &dist)?;
                }
            }
        }
        Ok(total)
    }
}
