use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, SimConfig, DEFAULT_MAX_QUBITS};
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, NoisyExecutor, Shots, ZneConfig};
use crate::oracle::{derive_spec, CompactSpec, TestCase, Term};
use crate::search::{run_search, ExactExecutor, Executor, SampledExecutor, SearchConfig, Strategy};
use crate::seed::{derive_seed, label_hash};

use super::fault::{draw_faults, inject_fault, make_equivalent, FaultSpec, FAULT_ANGLE_RANGE, MIN_FAULT_SHIFT};
use super::generators::{generate, GENERATORS};
use super::metrics::{avg_sim, classify, fds, mean, threshold_grid, ClassRow};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Default for Grid {
    fn default() -> Grid {
        Grid { lo: 0.1, hi: 5.44, steps: 30 }
    }
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>> {
        threshold_grid(self.lo, self.hi, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub generators: Vec<String>,
    pub qubits: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub runs: usize,
    pub faults_per_circuit: usize,
    pub seed: u64,
    pub budget: u64,
    /// Early-termination threshold in noiseless runs.
    pub threshold: Option<f64>,
    /// Early-termination threshold when `noise` is set; off by default so
    /// every run spends its full budget.
    pub noisy_threshold: Option<f64>,
    pub ga_population: usize,
    pub ga_generations: usize,
    /// `None` evaluates exactly (density matrix when noisy).
    pub shots: Option<u64>,
    pub noise: Option<NoiseModel>,
    pub zne: Option<ZneConfig>,
    pub fault_angle: (f64, f64),
    /// Required largest single-string expectation shift of a drawn fault.
    pub min_fault_shift: f64,
    pub equivalents: bool,
    /// Worker threads; `None` uses every logical core.
    pub jobs: Option<usize>,
    pub max_qubits: usize,
    pub thresholds: Grid,
}

impl Default for CampaignConfig {
    fn default() -> CampaignConfig {
        CampaignConfig {
            generators: GENERATORS.iter().map(|s| s.to_string()).collect(),
            qubits: vec![5, 10],
            strategies: Strategy::ALL.to_vec(),
            runs: 10,
            faults_per_circuit: 3,
            seed: 0,
            budget: 140,
            threshold: Some(0.01),
            noisy_threshold: None,
            ga_population: 40,
            ga_generations: 10,
            shots: None,
            noise: None,
            zne: None,
            fault_angle: FAULT_ANGLE_RANGE,
            min_fault_shift: MIN_FAULT_SHIFT,
            equivalents: true,
            jobs: None,
            max_qubits: DEFAULT_MAX_QUBITS,
            thresholds: Grid::default(),
        }
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<CampaignConfig> {
        let cfg: CampaignConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<CampaignConfig> {
        CampaignConfig::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.generators.is_empty() || self.qubits.is_empty() || self.strategies.is_empty() {
            return bad("generators, qubits and strategies must be nonempty".into());
        }
        if let Some(g) = self.generators.iter().find(|g| !GENERATORS.contains(&g.as_str())) {
            return bad(format!("unknown generator `{g}`"));
        }
        if self.runs == 0 || self.faults_per_circuit == 0 {
            return bad("runs and faults_per_circuit must be at least 1".into());
        }
        let (lo, hi) = self.fault_angle;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("bad fault angle range ({lo}, {hi})"));
        }
        if self.shots == Some(0) {
            return bad("shots must be at least 1".into());
        }
        if let Some(m) = &self.noise {
            m.validate()?;
        }
        if let Some(z) = &self.zne {
            z.validate()?;
            if self.noise.is_none() {
                return bad("zne requires a noise model".into());
            }
        }
        self.thresholds.values()?;
        self.search_config(Strategy::Rs, 0, None).validate()
    }

    fn search_config(&self, strategy: Strategy, seed: u64, pool_seed: Option<u64>) -> SearchConfig {
        let threshold = if self.noise.is_some() { self.noisy_threshold } else { self.threshold };
        SearchConfig {
            strategy,
            budget: self.budget,
            threshold,
            ga_population: self.ga_population,
            ga_generations: self.ga_generations,
            seed,
            pool_seed,
            ..SearchConfig::default()
        }
    }

    fn sim(&self) -> SimConfig {
        SimConfig { max_qubits: self.max_qubits }
    }

    fn shots(&self) -> Shots {
        self.shots.map_or(Shots::Exact, Shots::Count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultRecord {
    pub generator: String,
    pub qubits: usize,
    pub index: usize,
    pub fault: FaultSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub pauli: String,
    pub coeff: f64,
}

/// Outcome of one search against one target circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub generator: String,
    pub qubits: usize,
    pub strategy: Strategy,
    pub run: usize,
    /// `fault<i>` or `equivalent`.
    pub target: String,
    pub faulty: bool,
    pub seed: u64,
    pub pool_seed: u64,
    pub detected: bool,
    pub fitness: f64,
    pub exp: f64,
    pub obs: f64,
    pub evaluations_used: u64,
    pub terms: Vec<TermRecord>,
}

impl RunRecord {
    /// The best test case if the run detected a failure, otherwise empty.
    pub fn failing_test(&self) -> Result<TestCase> {
        if !self.detected {
            return Ok(TestCase::default());
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(Term { pauli: t.pauli.parse()?, coeff: t.coeff }))
            .collect::<Result<Vec<_>>>()?;
        TestCase::with_bound(terms, f64::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub cell: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub faults: Vec<FaultRecord>,
    pub runs: Vec<RunRecord>,
    pub failures: Vec<CellFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AvgFdsRow {
    pub strategy: Strategy,
    pub qubits: usize,
    pub circuit: String,
    pub avgfds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityRow {
    pub strategy: Strategy,
    pub qubits: usize,
    pub circuit: String,
    pub avgsim: f64,
}

struct Subject {
    generator: String,
    n: usize,
    spec: CompactSpec,
    targets: Vec<(String, bool, Circuit)>,
}

struct Job<'a> {
    subject: &'a Subject,
    target: usize,
    strategy: Strategy,
    run: usize,
}

fn strategy_code(s: Strategy) -> u64 {
    Strategy::ALL.iter().position(|&x| x == s).unwrap_or(0) as u64
}

fn prepare_subject(cfg: &CampaignConfig, generator: &str, n: usize) -> Result<(Subject, Vec<FaultRecord>)> {
    let sim = cfg.sim();
    let gen_seed = derive_seed(cfg.seed, &[label_hash("circuit"), label_hash(generator), n as u64]);
    let cut = generate(generator, n, gen_seed)?;
    let spec = derive_spec(&cut, &sim)?;
    let fault_seed = derive_seed(cfg.seed, &[label_hash("fault"), label_hash(generator), n as u64]);
    let faults = draw_faults(&cut, cfg.faults_per_circuit, fault_seed, cfg.fault_angle, cfg.min_fault_shift, &sim)?;
    let mut targets = Vec::new();
    let mut records = Vec::new();
    for (i, f) in faults.iter().enumerate() {
        targets.push((format!("fault{i}"), true, inject_fault(&cut, f)?));
        records.push(FaultRecord { generator: generator.to_string(), qubits: n, index: i, fault: *f });
    }
    if cfg.equivalents {
        targets.push(("equivalent".to_string(), false, make_equivalent(&cut)));
    }
    Ok((Subject { generator: generator.to_string(), n, spec, targets }, records))
}

fn run_job(cfg: &CampaignConfig, job: &Job<'_>) -> Result<RunRecord> {
    let s = job.subject;
    let (label, faulty, circuit) = &s.targets[job.target];
    let base = [label_hash(&s.generator), s.n as u64, strategy_code(job.strategy), job.run as u64];
    let pool_seed = derive_seed(cfg.seed, &[&[label_hash("pool")][..], &base].concat());
    let seed = derive_seed(cfg.seed, &[&[label_hash("search")][..], &base, &[job.target as u64]].concat());
    let exec_seed = derive_seed(seed, &[label_hash("execution")]);
    let search = cfg.search_config(job.strategy, seed, Some(pool_seed));
    let sim = cfg.sim();
    let mut executor: Box<dyn Executor> = match (&cfg.noise, cfg.shots()) {
        (None, Shots::Exact) => Box::new(ExactExecutor::new(circuit, &sim)?),
        (None, Shots::Count(shots)) => Box::new(SampledExecutor::new(circuit, shots, exec_seed, &sim)?),
        (Some(model), shots) => {
            Box::new(NoisyExecutor::new(circuit, *model, shots, exec_seed, cfg.zne.as_ref(), sim)?)
        }
    };
    let r = run_search(circuit, &s.spec, &search, executor.as_mut())?;
    Ok(RunRecord {
        generator: s.generator.clone(),
        qubits: s.n,
        strategy: job.strategy,
        run: job.run,
        target: label.clone(),
        faulty: *faulty,
        seed,
        pool_seed,
        detected: r.detected,
        fitness: r.best.record.fitness,
        exp: r.best.record.exp,
        obs: r.best.record.obs,
        evaluations_used: r.evaluations_used,
        terms: r
            .best
            .test
            .terms()
            .iter()
            .map(|t| TermRecord { pauli: t.pauli.to_string(), coeff: t.coeff })
            .collect(),
    })
}

/// Runs every (generator, n, target, strategy, run) cell. Cell failures are
/// collected rather than aborting the campaign.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let mut subjects = Vec::new();
    let mut faults = Vec::new();
    let mut failures = Vec::new();
    for g in &cfg.generators {
        for &n in &cfg.qubits {
            match prepare_subject(cfg, g, n) {
                Ok((s, f)) => {
                    subjects.push(s);
                    faults.extend(f);
                }
                Err(e) => failures.push(CellFailure { cell: format!("{g}/{n}"), message: e.to_string() }),
            }
        }
    }
    let jobs: Vec<Job<'_>> = subjects
        .iter()
        .flat_map(|subject| {
            (0..subject.targets.len()).flat_map(move |target| {
                cfg.strategies.iter().flat_map(move |&strategy| {
                    (0..cfg.runs).map(move |run| Job { subject, target, strategy, run })
                })
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Execution(e.to_string()))?;
    let outcomes: Vec<Result<RunRecord>> = pool.install(|| jobs.par_iter().map(|j| run_job(cfg, j)).collect());
    let mut runs = Vec::with_capacity(outcomes.len());
    for (job, outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(r) => runs.push(r),
            Err(e) => failures.push(CellFailure {
                cell: format!(
                    "{}/{}/{}/{}/{}",
                    job.subject.generator, job.subject.n, job.subject.targets[job.target].0, job.strategy, job.run
                ),
                message: e.to_string(),
            }),
        }
    }
    Ok(CampaignResult { faults, runs, failures })
}

type CellKey = (Strategy, usize, String);

fn cell_key(r: &RunRecord) -> CellKey {
    (r.strategy, r.qubits, r.generator.clone())
}

/// AvgFDS per (strategy, qubits, circuit): the per-run fraction of detected
/// faults, averaged over runs.
pub fn avgfds_rows(runs: &[RunRecord]) -> Vec<AvgFdsRow> {
    let mut per_run: BTreeMap<(CellKey, usize), Vec<bool>> = BTreeMap::new();
    for r in runs.iter().filter(|r| r.faulty) {
        per_run.entry((cell_key(r), r.run)).or_default().push(r.detected);
    }
    let mut cells: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
    for ((key, _), bits) in per_run {
        cells.entry(key).or_default().push(fds(&bits));
    }
    cells
        .into_iter()
        .map(|((strategy, qubits, circuit), scores)| AvgFdsRow { strategy, qubits, circuit, avgfds: mean(&scores) })
        .collect()
}

/// AvgSim per (strategy, qubits, circuit): for each fault, the mean pairwise
/// Jaccard similarity of the failing test cases of all runs (undetected runs
/// contribute an empty test case), averaged over faults.
pub fn similarity_rows(runs: &[RunRecord]) -> Result<Vec<SimilarityRow>> {
    let mut per_fault: BTreeMap<(CellKey, String), Vec<TestCase>> = BTreeMap::new();
    for r in runs.iter().filter(|r| r.faulty) {
        per_fault.entry((cell_key(r), r.target.clone())).or_default().push(r.failing_test()?);
    }
    let mut cells: BTreeMap<CellKey, Vec<f64>> = BTreeMap::new();
    for ((key, _), tests) in per_fault {
        if let Some(s) = avg_sim(&tests) {
            cells.entry(key).or_default().push(s);
        }
    }
    Ok(cells
        .into_iter()
        .map(|((strategy, qubits, circuit), sims)| SimilarityRow { strategy, qubits, circuit, avgsim: mean(&sims) })
        .collect())
}

/// Threshold sweep over the best fitness of every run, faulty runs being
/// the positive class.
pub fn classification(runs: &[RunRecord], thresholds: &[f64]) -> Vec<ClassRow> {
    let samples: Vec<(bool, f64)> = runs.iter().map(|r| (r.faulty, r.fitness)).collect();
    classify(&samples, thresholds)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

pub fn avgfds_csv(rows: &[AvgFdsRow]) -> String {
    let mut s = String::from("strategy,qubits,circuit,avgfds\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.strategy, r.qubits, r.circuit, r.avgfds);
    }
    s
}

pub fn similarity_csv(rows: &[SimilarityRow]) -> String {
    let mut s = String::from("strategy,qubits,circuit,avgsim\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.strategy, r.qubits, r.circuit, r.avgsim);
    }
    s
}

pub fn classification_csv(rows: &[ClassRow]) -> String {
    let mut s = String::from("threshold,precision,recall,f1,fp,fn\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.threshold,
            opt(r.precision),
            opt(r.recall),
            opt(r.f1),
            r.fp,
            r.fn_
        );
    }
    s
}

pub const RUNS_FILE: &str = "runs.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes the CSV tables, the raw run records and a manifest into `dir`.
pub fn write_outputs(cfg: &CampaignConfig, result: &CampaignResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let grid = cfg.thresholds.values()?;
    std::fs::write(dir.join("avgfds.csv"), avgfds_csv(&avgfds_rows(&result.runs)))?;
    std::fs::write(dir.join("similarity.csv"), similarity_csv(&similarity_rows(&result.runs)?))?;
    std::fs::write(dir.join("classification.csv"), classification_csv(&classification(&result.runs, &grid)))?;
    let mut runs = serde_json::to_string_pretty(result)?;
    runs.push('\n');
    std::fs::write(dir.join(RUNS_FILE), runs)?;
    let manifest = serde_json::json!({
        "config": cfg,
        "completed_runs": result.runs.len(),
        "failures": result.failures,
        "files": ["avgfds.csv", "similarity.csv", "classification.csv", RUNS_FILE],
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(())
}

/// Reads the run records written by [`write_outputs`].
pub fn load_results(dir: &Path) -> Result<CampaignResult> {
    let path = dir.join(RUNS_FILE);
    if !path.is_file() {
        return Err(Error::InvalidConfig(format!("no {RUNS_FILE} in {}", dir.display())));
    }
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CampaignConfig {
        CampaignConfig {
            generators: vec!["ghz".into(), "wstate".into()],
            qubits: vec![3],
            runs: 3,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn small_campaign_shapes() {
        let cfg = small();
        let r = run_campaign(&cfg).unwrap();
        assert!(r.failures.is_empty());
        assert_eq!(r.faults.len(), 2 * 3);
        assert_eq!(r.runs.len(), 2 * 4 * 4 * 3);
        assert!(r.runs.iter().filter(|x| !x.faulty).all(|x| !x.detected));
        let rows = avgfds_rows(&r.runs);
        assert_eq!(rows.len(), 2 * 4);
        assert!(rows.iter().all(|x| (0.0..=1.0).contains(&x.avgfds)));
        let sims = similarity_rows(&r.runs).unwrap();
        assert!(sims.iter().all(|x| (-1.0..=1.0).contains(&x.avgsim)));
        assert_eq!(r, run_campaign(&cfg).unwrap());
    }

    #[test]
    fn outputs_round_trip() {
        let cfg = CampaignConfig { strategies: vec![Strategy::OnePlusOneEa], ..small() };
        let r = run_campaign(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&cfg, &r, dir.path()).unwrap();
        assert_eq!(load_results(dir.path()).unwrap(), r);
        let csv = std::fs::read_to_string(dir.path().join("classification.csv")).unwrap();
        assert_eq!(csv.lines().count(), 31);
        assert!(load_results(&dir.path().join("missing")).is_err());
    }

    #[test]
    fn config_json() {
        let cfg = CampaignConfig::from_json(r#"{"qubits": [4], "strategies": ["GA", "EA"], "runs": 2}"#).unwrap();
        assert_eq!(cfg.qubits, [4]);
        assert_eq!(cfg.budget, 140);
        assert!(CampaignConfig::from_json(r#"{"generators": ["qft"]}"#).is_err());
        assert!(CampaignConfig::from_json(r#"{"budgett": 3}"#).is_err());
    }
}
