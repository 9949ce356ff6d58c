use std::fs;
use std::process::Command;

use gibbs_ar::harness::{read_csv, ExperimentConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gibbs-ar"))
}

fn config(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn shipped_configs_parse() {
    assert_eq!(ExperimentConfig::from_file(&config("default.toml")).unwrap(), ExperimentConfig::default());
    let small = ExperimentConfig::from_file(&config("small.toml")).unwrap();
    assert_eq!(small.replicates, 10);
}

#[test]
fn exit_codes() {
    assert_eq!(bin().output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    let out = bin().args(["bounds", "--T", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = bin().args(["experiment", "--config", "/no/such/file.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_report() {
    let out = bin().args(["bounds", "--T", "64", "--gamma0", "1.3333333333333333"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let m_star: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("M_star = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(m_star > 1e6, "{text}");
}

#[test]
fn simulate_to_stdout_is_seeded() {
    let run = || {
        bin().args(["simulate", "--d", "3", "--T", "20", "--seed", "5"]).output().unwrap()
    };
    let a = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, run().stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t,x"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["experiment", "--config"])
        .arg(config("small.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&dir.path().join("results.csv")).unwrap();
    assert_eq!(rows.len(), 3 * 2 * 10);
    let quantiles = fs::read_to_string(dir.path().join("quantiles.csv")).unwrap();
    assert_eq!(quantiles.lines().count(), 1 + 3 * 2);
    let svg = fs::read_to_string(dir.path().join("figure.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));

    // --seed changes the results
    let other = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["experiment", "--seed", "8", "--config"])
        .arg(config("small.toml"))
        .arg("--out")
        .arg(other.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_ne!(
        fs::read(dir.path().join("results.csv")).unwrap(),
        fs::read(other.path().join("results.csv")).unwrap()
    );
}
