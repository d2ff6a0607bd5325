use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const CONFIG: &str = "[env]\nH = 30\nM = 128\nseed = 3\n\n[agents]\nn = 500\nseed = 11\n";

fn craft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_craft")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    path(&p).to_owned()
}

fn generate(dir: &Path) -> (String, String, String) {
    let cfg = write_config(dir, "toy.toml", CONFIG);
    let out = dir.join("data");
    let res = craft(&["generate", "--config", &cfg, "--out", path(&out)]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    (
        cfg,
        path(&out.join("agent_A.exbmdp")).to_owned(),
        path(&out.join("agent_B.exbmdp")).to_owned(),
    )
}

#[test]
fn generate_writes_headers_and_manifest() {
    let dir = TempDir::new().unwrap();
    let (_, a, b) = generate(dir.path());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "EXBMDP v1 agent=A H=30 obslen=128 n=500 labeled=1"
    );
    assert_eq!(text.lines().count(), 501);
    let text = fs::read_to_string(&b).unwrap();
    assert!(text.starts_with("EXBMDP v1 agent=B H=30 obslen=128 n=500 labeled=1\n"));
    let manifest = fs::read_to_string(dir.path().join("data/generate_manifest.json")).unwrap();
    assert!(manifest.contains("\"config_hash\""));
}

#[test]
fn generate_is_reproducible() {
    let (x, y) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let (_, a1, _) = generate(x.path());
    let (_, a2, _) = generate(y.path());
    assert_eq!(fs::read(a1).unwrap(), fs::read(a2).unwrap());
}

#[test]
fn corrupted_dataset_exits_with_data_error() {
    let dir = TempDir::new().unwrap();
    let (cfg, a, b) = generate(dir.path());
    let text = fs::read_to_string(&a).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let broken = lines[6].replacen('0', "x", 1);
    lines[6] = &broken;
    fs::write(&a, lines.join("\n")).unwrap();
    let res = craft(&["run", "single-obs", "--a", &a, "--b", &b, "--config", &cfg]);
    assert_eq!(res.status.code(), Some(3));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("line 7"), "{err}");
}

#[test]
fn unknown_config_key_exits_with_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "[env]\nH = 3\nM = 4\nseed = 0\nwidth = 9\n");
    let res = craft(&["generate", "--config", &cfg, "--out", path(dir.path())]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("width"));
}

#[test]
fn two_step_baseline_rejects_long_horizon() {
    let dir = TempDir::new().unwrap();
    let (cfg, a, b) = generate(dir.path());
    let res = craft(&["run", "draft", "--a", &a, "--b", &b, "--config", &cfg]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn unknown_technique_is_an_argument_error() {
    let dir = TempDir::new().unwrap();
    let (cfg, a, b) = generate(dir.path());
    let res = craft(&["run", "kmeans", "--a", &a, "--b", &b, "--config", &cfg]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn run_writes_manifest_that_inspect_reads() {
    let dir = TempDir::new().unwrap();
    let (cfg, a, b) = generate(dir.path());
    let manifest = dir.path().join("run.json");
    let res = craft(&[
        "run",
        "single-obs",
        "--a",
        &a,
        "--b",
        &b,
        "--config",
        &cfg,
        "--out",
        path(&manifest),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(json["technique"], "single-obs");
    let acc = json["average_population_accuracy"].as_f64().unwrap();
    assert!((0.5..=1.0).contains(&acc));
    let shown = craft(&["inspect", path(&manifest)]);
    assert!(shown.status.success());
    assert_eq!(
        String::from_utf8(shown.stdout).unwrap(),
        String::from_utf8(res.stdout).unwrap()
    );
}

#[test]
fn check_assumptions_reports_constants() {
    let dir = TempDir::new().unwrap();
    let (cfg, a, b) = generate(dir.path());
    let res = craft(&["check-assumptions", "--a", &a, "--b", &b, "--config", &cfg]);
    assert!(res.status.success());
    let json: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(json["nu_hat"].as_f64().unwrap() > 0.0);
    assert!(json["violations"].is_array());
}

#[test]
fn benchmark_output_ignores_thread_count() {
    let dir = TempDir::new().unwrap();
    let run = |threads: &str| {
        let out = dir.path().join(format!("t{threads}"));
        let res = craft(&[
            "--threads",
            threads,
            "reproduce-table1",
            "--seeds",
            "2",
            "--sizes",
            "200,400",
            "--out",
            path(&out),
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        ["table.csv", "trials.csv", "table.json"].map(|f| fs::read(out.join(f)).unwrap())
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn single_seed_benchmark_warns() {
    let dir = TempDir::new().unwrap();
    let res = craft(&[
        "reproduce-table1",
        "--seeds",
        "1",
        "--sizes",
        "100",
        "--out",
        path(dir.path()),
    ]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("low confidence"));
}
