use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const GHZ5: &str = "qubits 5\nh 0\ncx 0 1\ncx 1 2\ncx 2 3\ncx 3 4\n";
const GHZ5_FAULT: &str = "qubits 5\nh 0\ncx 0 1\nry 0.3 2\ncx 1 2\ncx 2 3\ncx 3 4\n";
// Same state as GHZ5 through a different gate sequence.
const GHZ5_EQ: &str = "qubits 5\nh 0\ncx 0 1\ncx 1 2\nz 4\ncx 2 3\ncx 3 4\nz 4\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pauliprobe"));
    c.env_remove("PAULIPROBE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ghz_setup() -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let circuit = write(dir.path(), "ghz5.txt", GHZ5);
    let spec = dir.path().join("spec.json");
    let o = run(&["specgen", s(&circuit), "--out", s(&spec)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    (dir, spec)
}

#[test]
fn help_lists_flags() {
    let o = run(&["--help"]);
    assert_eq!(code(&o), 0);
    let o = run(&["test", "--help"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for flag in [
        "--spec", "--strategy", "--budget", "--threshold", "--seed", "--shots", "--noise", "--zne", "--zne-factors",
        "--zne-degree", "--out",
    ] {
        assert!(text.contains(flag), "missing {flag}");
    }
    let o = run(&["report", "--help"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("--thresholds"));
}

#[test]
fn specgen_bell_and_ghz() {
    let dir = TempDir::new().unwrap();
    let bell = write(dir.path(), "bell.txt", "qubits 2\nh 0\ncx 0 1\n");
    let out = dir.path().join("bell.json");
    let o = run(&["specgen", s(&bell), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "designated ZZ outcomes 2");
    let spec: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(spec["designated"], "ZZ");
    assert_eq!(spec["outcomes"].as_object().unwrap().len(), 2);

    let (dir, spec) = ghz_setup();
    let v: Value = serde_json::from_str(&fs::read_to_string(spec).unwrap()).unwrap();
    assert_eq!(v["outcomes"].as_object().unwrap().len(), 2);
    drop(dir);
}

#[test]
fn malformed_circuit_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.txt", "qubits 2\nh 0\nfoo 1\n");
    let o = run(&["specgen", s(&bad), "--out", s(&dir.path().join("x.json"))]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn oversized_register_is_runtime_error() {
    let dir = TempDir::new().unwrap();
    let c = write(dir.path(), "wide.txt", "qubits 8\nh 0\n");
    let o = run(&["specgen", s(&c), "--out", s(&dir.path().join("x.json")), "--max-qubits", "4"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn faulty_circuit_is_detected() {
    let (dir, spec) = ghz_setup();
    let cut = write(dir.path(), "fault.txt", GHZ5_FAULT);
    let out = dir.path().join("result.json");
    let o = run(&[
        "test", s(&cut), "--spec", s(&spec), "--strategy", "ea", "--seed", "7", "--threshold", "0.01", "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["detected"], true);
    assert_eq!(r["strategy"], "EA");
    assert_eq!(r["seed"], 7);
    assert!(r["best"]["fitness"].as_f64().unwrap() > 0.01);
}

#[test]
fn equivalent_circuit_passes() {
    let (dir, spec) = ghz_setup();
    let cut = write(dir.path(), "eq.txt", GHZ5_EQ);
    for strategy in ["rs", "ga", "hc", "ea"] {
        let o = run(&["test", s(&cut), "--spec", s(&spec), "--strategy", strategy]);
        assert_eq!(code(&o), 0);
        let r: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(r["detected"], false);
        assert!(r["best"]["fitness"].as_f64().unwrap() <= 1e-9);
        assert_eq!(r["evaluations_used"], 140);
    }
}

#[test]
fn flag_errors_are_usage_errors() {
    let (dir, spec) = ghz_setup();
    let cut = write(dir.path(), "c.txt", GHZ5);
    assert_eq!(code(&run(&["test", s(&cut), "--spec", s(&spec), "--strategy", "bogus"])), 2);
    assert_eq!(code(&run(&["test", s(&cut), "--spec", s(&spec), "--frobnicate"])), 2);
    assert_eq!(code(&run(&["test", s(&cut), "--spec", s(&spec), "--zne"])), 2);
    assert_eq!(code(&run(&["test", s(&cut), "--spec", s(&spec), "--shots", "0"])), 2);
    assert_eq!(code(&run(&["test", s(&cut), "--spec", s(&spec), "--threshold", "-1"])), 2);
    let small = write(dir.path(), "small.txt", "qubits 3\nh 0\n");
    assert_eq!(code(&run(&["test", s(&small), "--spec", s(&spec)])), 2);
    assert_eq!(code(&run(&["bogus"])), 2);
}

#[test]
fn test_output_is_reproducible() {
    let (dir, spec) = ghz_setup();
    let cut = write(dir.path(), "fault.txt", GHZ5_FAULT);
    let args = ["test", s(&cut), "--spec", s(&spec), "--strategy", "ga", "--threshold", "none", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    // Without a threshold the whole budget is spent and nothing is flagged.
    assert_eq!(code(&a), 0);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["evaluations_used"], 140);
    assert!(r["best"]["fitness"].as_f64().unwrap() > 0.01);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_from_environment() {
    let (dir, spec) = ghz_setup();
    let cut = write(dir.path(), "c.txt", GHZ5);
    let o = bin().args(["test", s(&cut), "--spec", s(&spec)]).env("PAULIPROBE_SEED", "42").output().unwrap();
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["seed"], 42);
    let o = bin().args(["test", s(&cut), "--spec", s(&spec), "--seed", "5"]).env("PAULIPROBE_SEED", "42").output().unwrap();
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["seed"], 5);
}

#[test]
fn noisy_test_with_zne() {
    let (dir, spec) = ghz_setup();
    let cut = write(dir.path(), "c.txt", GHZ5);
    let noise = write(dir.path(), "noise.json", r#"{"depol_1q": 0.001, "depol_2q": 0.01, "readout_flip": 0.02}"#);
    let base = ["test", s(&cut), "--spec", s(&spec), "--threshold", "none", "--budget", "30", "--noise", s(&noise)];
    let fit = |extra: &[&str]| {
        let o = run(&[&base[..], extra].concat());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let r: Value = serde_json::from_slice(&o.stdout).unwrap();
        r["best"]["fitness"].as_f64().unwrap()
    };
    let raw = fit(&[]);
    let mitigated = fit(&["--zne", "--zne-factors", "1,2,3", "--zne-degree", "2"]);
    assert!(raw > 0.01);
    assert!(mitigated < raw, "{mitigated} vs {raw}");
    assert!(fit(&["--shots", "512", "--zne"]).is_finite());
    let bad = write(dir.path(), "bad.json", r#"{"depol_1q": 0.001, "typo": 1}"#);
    let o = run(&["test", s(&cut), "--spec", s(&spec), "--noise", s(&bad)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bench_and_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "campaign.json",
        r#"{"generators": ["ghz", "su2"], "qubits": [3], "runs": 2, "faults_per_circuit": 2}"#,
    );
    let out = dir.path().join("results");
    let o = run(&["bench", "--config", s(&cfg), "--out", s(&out), "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let avgfds = fs::read_to_string(out.join("avgfds.csv")).unwrap();
    let mut lines = avgfds.lines();
    assert_eq!(lines.next(), Some("strategy,qubits,circuit,avgfds"));
    let strategies: std::collections::BTreeSet<_> = lines.map(|l| l.split(',').next().unwrap().to_string()).collect();
    assert_eq!(strategies.into_iter().collect::<Vec<_>>(), ["EA", "GA", "HC", "RS"]);
    for f in ["similarity.csv", "classification.csv", "runs.json", "manifest.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }

    let o = run(&["report", "--in", s(&out), "--thresholds", "0.1:5.44:30"]);
    assert_eq!(code(&o), 0);
    let table = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 30);
    assert!(rows[0].starts_with("0.1,"));
    assert!(rows[29].starts_with("5.44,"));
    assert_eq!(table, fs::read_to_string(out.join("classification.csv")).unwrap());

    let again = dir.path().join("again");
    let o = run(&["bench", "--config", s(&cfg), "--out", s(&again), "--jobs", "1"]);
    assert_eq!(code(&o), 0);
    for f in ["avgfds.csv", "similarity.csv", "classification.csv", "runs.json"] {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }

    let rewritten = dir.path().join("rewritten");
    let o = run(&["report", "--in", s(&out), "--out", s(&rewritten)]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(out.join("avgfds.csv")).unwrap(), fs::read(rewritten.join("avgfds.csv")).unwrap());
}

#[test]
fn report_rejects_empty_dir() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(&["report", "--in", s(dir.path())])), 2);
    assert_eq!(code(&run(&["report", "--in", s(dir.path()), "--thresholds", "1:0:3"])), 2);
}

#[test]
fn bench_rejects_bad_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"generators": ["nope"]}"#);
    assert_eq!(code(&run(&["bench", "--config", s(&cfg), "--out", s(&dir.path().join("o"))])), 2);
    let cfg = write(dir.path(), "d.json", r#"{"runz": 3}"#);
    assert_eq!(code(&run(&["bench", "--config", s(&cfg), "--out", s(&dir.path().join("o"))])), 2);
}

#[test]
fn sim_and_partition() {
    let dir = TempDir::new().unwrap();
    let bell = write(dir.path(), "bell.txt", "qubits 2\nh 0\ncx 0 1\n");
    let o = run(&["sim", s(&bell)]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["outcomes"]["00"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((v["outcomes"]["11"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(v["shots"].is_null());

    let o = run(&["sim", s(&bell), "--shots", "1000", "--seed", "1", "--noise", "default"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let total: f64 = v["outcomes"].as_object().unwrap().values().map(|x| x.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert_eq!(v["shots"], 1000);

    let o = run(&["partition", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let covered: usize = text.lines().map(|l| l.split('\t').nth(1).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(covered, 16);
    assert!(text.lines().next().unwrap().ends_with("II IZ ZI ZZ"));
    assert_eq!(code(&run(&["partition", "9"])), 2);
}
