use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use pauliprobe::bench::{
    avgfds_csv, avgfds_rows, classification, classification_csv, load_results, run_campaign, similarity_csv,
    similarity_rows, write_outputs, CampaignConfig, Grid, MANIFEST_FILE,
};
use pauliprobe::circuit::{exact_distribution, parse_circuit, sample, simulate_with, Circuit, SimConfig};
use pauliprobe::noise::{channel_distribution, noisy_sample, NoiseModel, NoisyExecutor, Shots, ZneConfig, ZneMode};
use pauliprobe::oracle::{derive_spec, CompactSpec};
use pauliprobe::pauli::partition_all;
use pauliprobe::search::{run_search, ExactExecutor, Executor, SampledExecutor, SearchConfig, Strategy};
use pauliprobe::seed::rng_from;

const EXIT_DETECTED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

/// Search-based assessment of quantum programs with Pauli-string test cases.
#[derive(Parser)]
#[command(name = "pauliprobe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a reference circuit and write its compact specification.
    Specgen {
        /// Circuit file.
        circuit: PathBuf,
        /// Output path for the specification JSON.
        #[arg(long)]
        out: PathBuf,
        /// Largest register the simulator accepts.
        #[arg(long, default_value_t = pauliprobe::circuit::DEFAULT_MAX_QUBITS)]
        max_qubits: usize,
    },
    /// Search for a test case that separates a circuit from its specification.
    /// Exits 1 when a fault is detected and 0 otherwise.
    Test(TestArgs),
    /// Run a benchmark campaign and write its CSV tables.
    Bench {
        /// Campaign configuration JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: every logical core).
        #[arg(long)]
        jobs: Option<usize>,
        /// Override the campaign base seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the classification grid as lo:hi:steps.
        #[arg(long, value_parser = parse_grid)]
        thresholds: Option<Grid>,
    },
    /// Recompute the tables of a finished campaign from its stored runs.
    Report {
        /// Campaign output directory.
        #[arg(long = "in")]
        input: PathBuf,
        /// Classification grid as lo:hi:steps (default: the campaign's grid).
        #[arg(long, value_parser = parse_grid)]
        thresholds: Option<Grid>,
        /// Write avgfds.csv, similarity.csv and classification.csv here
        /// instead of printing the classification table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the outcome distribution of a circuit as JSON.
    Sim {
        /// Circuit file.
        circuit: PathBuf,
        /// Number of shots; omitted means the exact distribution.
        #[arg(long)]
        shots: Option<u64>,
        /// Seed for sampling.
        #[arg(long, env = "PAULIPROBE_SEED", default_value_t = 0)]
        seed: u64,
        /// Noise model JSON file, or `default` for the built-in model.
        #[arg(long)]
        noise: Option<String>,
        /// Largest register the simulator accepts.
        #[arg(long, default_value_t = pauliprobe::circuit::DEFAULT_MAX_QUBITS)]
        max_qubits: usize,
    },
    /// List a partition of all n-qubit Pauli strings into commuting families.
    Partition {
        /// Number of qubits (1 to 6).
        qubits: usize,
    },
}

#[derive(Args)]
struct TestArgs {
    /// Circuit under test.
    circuit: PathBuf,
    /// Compact specification JSON produced by `specgen`.
    #[arg(long)]
    spec: PathBuf,
    /// rs, ga, hc or ea.
    #[arg(long, default_value = "ea", value_parser = parse_strategy)]
    strategy: Strategy,
    /// Fitness evaluation budget.
    #[arg(long, default_value_t = 140)]
    budget: u64,
    /// Detection threshold, or `none` to always spend the whole budget.
    #[arg(long, default_value = "0.01", value_parser = parse_threshold)]
    threshold: Threshold,
    /// Search seed.
    #[arg(long, env = "PAULIPROBE_SEED", default_value_t = 0)]
    seed: u64,
    /// Seed of the Pauli string pool (default: derived from --seed).
    #[arg(long)]
    pool_seed: Option<u64>,
    /// Shots per evaluation; omitted means exact evaluation.
    #[arg(long)]
    shots: Option<u64>,
    /// GA population size.
    #[arg(long, default_value_t = 40)]
    population: usize,
    /// GA generations.
    #[arg(long, default_value_t = 10)]
    generations: usize,
    /// Noise model JSON file, or `default` for the built-in model.
    #[arg(long)]
    noise: Option<String>,
    /// Apply zero-noise extrapolation (requires --noise).
    #[arg(long)]
    zne: bool,
    /// Comma-separated noise scale factors starting at 1.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    zne_factors: Vec<f64>,
    /// Polynomial degree of the extrapolation.
    #[arg(long, default_value_t = 3)]
    zne_degree: usize,
    /// auto, scaling or folding.
    #[arg(long, default_value = "auto", value_parser = parse_zne_mode)]
    zne_mode: ZneMode,
    /// Write the result JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest register the simulator accepts.
    #[arg(long, default_value_t = pauliprobe::circuit::DEFAULT_MAX_QUBITS)]
    max_qubits: usize,
}

#[derive(Clone, Copy)]
struct Threshold(Option<f64>);

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

type Outcome = Result<u8, Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse::<Strategy>().map_err(|e| e.to_string())
}

fn parse_threshold(s: &str) -> Result<Threshold, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(Threshold(None));
    }
    let t: f64 = s.parse().map_err(|_| format!("invalid threshold `{s}`"))?;
    if !t.is_finite() || t < 0.0 {
        return Err(format!("threshold must be a non-negative number, got {s}"));
    }
    Ok(Threshold(Some(t)))
}

fn parse_zne_mode(s: &str) -> Result<ZneMode, String> {
    match s {
        "auto" => Ok(ZneMode::Auto),
        "scaling" => Ok(ZneMode::Scaling),
        "folding" => Ok(ZneMode::Folding),
        _ => Err(format!("unknown ZNE mode `{s}`")),
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, steps] = parts[..] else {
        return Err(format!("expected lo:hi:steps, got `{s}`"));
    };
    let grid = Grid {
        lo: lo.parse().map_err(|_| format!("invalid lower bound `{lo}`"))?,
        hi: hi.parse().map_err(|_| format!("invalid upper bound `{hi}`"))?,
        steps: steps.parse().map_err(|_| format!("invalid step count `{steps}`"))?,
    };
    grid.values().map_err(|e| e.to_string())?;
    Ok(grid)
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("circuit");
    parse_circuit(&text, name).with_context(|| format!("parsing {}", path.display())).map_err(usage)
}

fn load_noise(arg: &str) -> Result<NoiseModel, Failure> {
    if arg == "default" {
        return Ok(NoiseModel::default());
    }
    NoiseModel::load(Path::new(arg)).with_context(|| format!("loading noise model {arg}")).map_err(usage)
}

fn shots_of(shots: Option<u64>) -> Result<Shots, Failure> {
    match shots {
        None => Ok(Shots::Exact),
        Some(0) => Err(usage(anyhow!("--shots must be at least 1"))),
        Some(n) => Ok(Shots::Count(n)),
    }
}

/// Writes to stdout; a closed pipe on the reading side is not an error.
fn print_out(text: &str) -> Result<(), Failure> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(runtime(e)),
        _ => Ok(()),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))
            .map_err(runtime),
        None => print_out(&format!("{text}\n")),
    }
}

fn cmd_specgen(circuit: &Path, out: &Path, max_qubits: usize) -> Outcome {
    let c = load_circuit(circuit)?;
    let spec = derive_spec(&c, &SimConfig { max_qubits }).map_err(runtime)?;
    spec.save(out).with_context(|| format!("writing {}", out.display())).map_err(runtime)?;
    print_out(&format!("designated {} outcomes {}\n", spec.designated, spec.outcomes.len()))?;
    Ok(0)
}

fn cmd_test(a: &TestArgs) -> Outcome {
    let cut = load_circuit(&a.circuit)?;
    let spec = CompactSpec::load(&a.spec).with_context(|| format!("loading {}", a.spec.display())).map_err(usage)?;
    if spec.n_qubits() != cut.n_qubits() {
        return Err(usage(anyhow!(
            "specification has {} qubits but the circuit has {}",
            spec.n_qubits(),
            cut.n_qubits()
        )));
    }
    let cfg = SearchConfig {
        strategy: a.strategy,
        budget: a.budget,
        threshold: a.threshold.0,
        ga_population: a.population,
        ga_generations: a.generations,
        seed: a.seed,
        pool_seed: a.pool_seed,
        ..SearchConfig::default()
    };
    cfg.validate().map_err(usage)?;
    let shots = shots_of(a.shots)?;
    let sim = SimConfig { max_qubits: a.max_qubits };
    let noise = a.noise.as_deref().map(load_noise).transpose()?;
    if a.zne && noise.is_none() {
        return Err(usage(anyhow!("--zne requires --noise")));
    }
    let zne = ZneConfig { scale_factors: a.zne_factors.clone(), degree: a.zne_degree, mode: a.zne_mode };
    if a.zne {
        zne.validate().map_err(usage)?;
    }
    let mut executor: Box<dyn Executor> = match (noise, shots) {
        (Some(model), _) => {
            model.validate().map_err(usage)?;
            let z = a.zne.then_some(&zne);
            Box::new(NoisyExecutor::new(&cut, model, shots, a.seed, z, sim).map_err(runtime)?)
        }
        (None, Shots::Exact) => Box::new(ExactExecutor::new(&cut, &sim).map_err(runtime)?),
        (None, Shots::Count(n)) => Box::new(SampledExecutor::new(&cut, n, a.seed, &sim).map_err(runtime)?),
    };
    let result = run_search(&cut, &spec, &cfg, executor.as_mut()).map_err(runtime)?;
    emit(&result.to_json().map_err(runtime)?, a.out.as_deref())?;
    eprintln!(
        "{} {}: fitness {} after {} evaluations",
        result.strategy,
        if result.detected { "detected a fault" } else { "found no fault" },
        result.best.record.fitness,
        result.evaluations_used
    );
    Ok(if result.detected { EXIT_DETECTED } else { 0 })
}

fn cmd_bench(config: &Path, out: &Path, jobs: Option<usize>, seed: Option<u64>, grid: Option<Grid>) -> Outcome {
    let mut cfg = CampaignConfig::load(config).with_context(|| format!("loading {}", config.display())).map_err(usage)?;
    if jobs.is_some() {
        cfg.jobs = jobs;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(g) = grid {
        cfg.thresholds = g;
    }
    cfg.validate().map_err(usage)?;
    let result = run_campaign(&cfg).map_err(runtime)?;
    write_outputs(&cfg, &result, out).with_context(|| format!("writing {}", out.display())).map_err(runtime)?;
    eprintln!("{} runs written to {}", result.runs.len(), out.display());
    if !result.failures.is_empty() {
        for f in &result.failures {
            eprintln!("cell failed: {}", json!(f));
        }
        return Err(runtime(anyhow!("{} campaign cells failed", result.failures.len())));
    }
    Ok(0)
}

fn stored_grid(dir: &Path) -> Option<Grid> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
    let manifest: serde_json::Value = serde_json::from_str(&text).ok()?;
    let cfg: CampaignConfig = serde_json::from_value(manifest.get("config")?.clone()).ok()?;
    Some(cfg.thresholds)
}

fn cmd_report(input: &Path, grid: Option<Grid>, out: Option<&Path>) -> Outcome {
    let result = load_results(input).map_err(usage)?;
    if result.runs.is_empty() {
        return Err(usage(anyhow!("{} holds no run records", input.display())));
    }
    let grid = grid.or_else(|| stored_grid(input)).unwrap_or_default();
    let thresholds = grid.values().map_err(usage)?;
    let table = classification_csv(&classification(&result.runs, &thresholds));
    match out {
        None => print_out(&table)?,
        Some(dir) => {
            let write = || -> anyhow::Result<()> {
                fs::create_dir_all(dir)?;
                fs::write(dir.join("avgfds.csv"), avgfds_csv(&avgfds_rows(&result.runs)))?;
                fs::write(dir.join("similarity.csv"), similarity_csv(&similarity_rows(&result.runs)?))?;
                fs::write(dir.join("classification.csv"), &table)?;
                Ok(())
            };
            write().with_context(|| format!("writing {}", dir.display())).map_err(runtime)?;
        }
    }
    Ok(0)
}

fn cmd_sim(circuit: &Path, shots: Option<u64>, seed: u64, noise: Option<&str>, max_qubits: usize) -> Outcome {
    let c = load_circuit(circuit)?;
    let shots = shots_of(shots)?;
    let sim = SimConfig { max_qubits };
    let noise = noise.map(load_noise).transpose()?;
    if let Some(m) = &noise {
        m.validate().map_err(usage)?;
    }
    let mut rng = rng_from(seed);
    let dist = match (noise, shots) {
        (None, Shots::Exact) => exact_distribution(&simulate_with(&c, &sim).map_err(runtime)?),
        (None, Shots::Count(n)) => sample(&simulate_with(&c, &sim).map_err(runtime)?, n, &mut rng),
        (Some(m), Shots::Exact) => channel_distribution(&c, &m).map_err(runtime)?,
        (Some(m), Shots::Count(n)) => noisy_sample(&c, &m, n, &mut rng, &sim).map_err(runtime)?,
    };
    let shots = match shots {
        Shots::Exact => json!(null),
        Shots::Count(n) => json!(n),
    };
    let doc = json!({
        "circuit": c.name(),
        "qubits": c.n_qubits(),
        "shots": shots,
        "outcomes": dist.rendered(),
    });
    print_out(&format!("{}\n", serde_json::to_string_pretty(&doc).map_err(runtime)?))?;
    Ok(0)
}

fn cmd_partition(n: usize) -> Outcome {
    let families = partition_all(n).map_err(usage)?;
    let mut text = String::new();
    for (i, f) in families.iter().enumerate() {
        let members: Vec<String> = f.iter().map(|p| p.to_string()).collect();
        text.push_str(&format!("{i}\t{}\t{}\n", members.len(), members.join(" ")));
    }
    print_out(&text)?;
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Specgen { circuit, out, max_qubits } => cmd_specgen(&circuit, &out, max_qubits),
        Command::Test(a) => cmd_test(&a),
        Command::Bench { config, out, jobs, seed, thresholds } => cmd_bench(&config, &out, jobs, seed, thresholds),
        Command::Report { input, thresholds, out } => cmd_report(&input, thresholds, out.as_deref()),
        Command::Sim { circuit, shots, seed, noise, max_qubits } => {
            cmd_sim(&circuit, shots, seed, noise.as_deref(), max_qubits)
        }
        Command::Partition { qubits } => cmd_partition(qubits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
