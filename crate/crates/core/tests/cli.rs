use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dtnsim::config::{serialize_scenario, ScenarioConfig};

const BIN: &str = env!("CARGO_BIN_EXE_dtnsim");

fn shipped() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/stadium.conf")
}

fn dtnsim(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn tiny_config(dir: &Path) -> PathBuf {
    let mut cfg = ScenarioConfig::stadium().scaled_to(12);
    cfg.sim_duration = 600.0;
    let path = dir.join("tiny.conf");
    fs::write(&path, serialize_scenario(&cfg)).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    assert_eq!(dtnsim(&["validate", s(&shipped())]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::stadium();
    cfg.buffer_bytes = 200_000;
    let bad = dir.path().join("bad.conf");
    fs::write(&bad, serialize_scenario(&cfg)).unwrap();
    let out = dtnsim(&["validate", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let missing = dir.path().join("nope.conf");
    assert_eq!(dtnsim(&["validate", s(&missing)]).status.code(), Some(2));
    assert_eq!(dtnsim(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn run_writes_metrics_and_events() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_dir = dir.path().join("out");
    let out = dtnsim(&["run", s(&cfg), "--seed", "4", "--out", s(&out_dir), "--events"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    for key in ["delivery_probability", "latency_avg_s", "overhead_ratio", "hopcount_avg", "dropped"] {
        assert!(stdout.contains(key), "missing {key} in {stdout}");
    }
    let csv = fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let events = fs::read_to_string(out_dir.join("events.tsv")).unwrap();
    let first = events.lines().next().unwrap();
    let fields: Vec<&str> = first.split('\t').collect();
    assert_eq!(fields.len(), 7);
    assert!(matches!(fields[1], "CREATED" | "CONTACT_UP"), "{first}");
}

#[test]
fn sweep_then_plot_reproduces_charts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out_dir = dir.path().join("sweep");
    let out = Command::new(BIN)
        .args(["sweep", s(&cfg), "--buffers", "5M,20M", "--seeds", "1,2", "--out", s(&out_dir)])
        .env("DTNSIM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    let charts = [
        "delivery_probability",
        "latency_avg",
        "overhead_ratio",
        "hopcount_avg",
        "dropped",
    ];
    for c in charts {
        let svg = fs::read_to_string(out_dir.join(format!("{c}.svg"))).unwrap();
        assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    }
    assert!(out_dir.join("manifest.txt").exists());

    let replot = dir.path().join("replot");
    let out = dtnsim(&["plot", s(&out_dir.join("results.csv")), "--out", s(&replot)]);
    assert_eq!(out.status.code(), Some(0));
    for c in charts {
        let name = format!("{c}.svg");
        assert_eq!(fs::read(out_dir.join(&name)).unwrap(), fs::read(replot.join(&name)).unwrap());
    }
}

#[test]
fn sweep_rejects_empty_buffers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny_config(dir.path());
    let out = dtnsim(&["sweep", s(&cfg), "--buffers", "", "--out", s(&dir.path().join("o"))]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn plot_names_missing_column() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    fs::write(&csv, "protocol,buffer_bytes,seed,created\nepidemic,5000000,1,10\n").unwrap();
    let out = dtnsim(&["plot", s(&csv), "--out", s(&dir.path().join("p"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("delivered"));
}
