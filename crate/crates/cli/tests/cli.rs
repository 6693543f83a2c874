use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn tising(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tising")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = tising(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn generate_sample_estimate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.txt");
    let s = dir.path().join("s.txt");
    let (t, s) = (t.to_str().unwrap(), s.to_str().unwrap());
    ok(&["generate", "--model", "sk,p=3,n=12,seed=5", "--out", t]);
    let meta: Value = serde_json::from_str(&fs::read_to_string(format!("{t}.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["family"], "sk");
    assert_eq!(meta["seed"], 5);
    ok(&["sample", "--tensor-file", t, "--beta", "0.5", "--samples", "4", "--seed", "9", "--out", s]);
    assert_eq!(fs::read_to_string(s).unwrap().lines().count(), 4);
    let est = ok(&["estimate", "--tensor-file", t, "--sample-file", s]);
    let recs: Vec<Value> = est.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 4);
    for r in recs {
        assert!(r["beta_hat"].is_f64() || r["beta_hat"] == "inf");
    }
}

#[test]
fn sampling_is_reproducible() {
    let a = ok(&["sample", "--model", "er,p=3,n=15,theta=0.5,seed=1", "--beta", "1", "--samples", "3", "--seed", "4"]);
    let b = ok(&["sample", "--model", "er,p=3,n=15,theta=0.5,seed=1", "--beta", "1", "--samples", "3", "--seed", "4"]);
    assert_eq!(a, b);
}

#[test]
fn infinite_estimate_serializes_as_string() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("x.txt");
    fs::write(&s, "1 -1 1 -1 1 -1\n").unwrap();
    let out = ok(&["estimate", "--model", "cw,p=3,n=6", "--sample-file", s.to_str().unwrap()]);
    let r: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(r["beta_hat"], 0.0);
    fs::write(&s, "1 1 1 1 -1 -1\n").unwrap();
    let out = ok(&["estimate", "--model", "cw,p=3,n=6", "--sample-file", s.to_str().unwrap(), "--ci-level", "0.9"]);
    let r: Value = serde_json::from_str(out.trim()).unwrap();
    assert!(r["ci"].is_object());
}

#[test]
fn threshold_values() {
    let r: Value = serde_json::from_str(&ok(&["threshold", "--family", "cw", "--p", "2"])).unwrap();
    assert!((r["beta_star"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    let r: Value = serde_json::from_str(&ok(&["threshold", "--family", "er", "--p", "3", "--theta", "0.5"])).unwrap();
    assert!((r["beta_star"].as_f64().unwrap() - 2.0 * 0.672084786).abs() < 1e-6);
    assert!(!tising(&["threshold", "--family", "sk", "--p", "3"]).status.success());
}

#[test]
fn oracle_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("cw.txt");
    fs::write(&t, "2 8 cw\n").unwrap();
    let t = t.to_str().unwrap();
    let z: f64 = ok(&["oracle", "logZ", "--tensor-file", t, "--beta", "0"]).trim().parse().unwrap();
    assert!(z.abs() < 1e-12);
    let pmf = ok(&["oracle", "magpmf", "--p", "2", "--n", "8", "--beta", "0.3"]);
    assert_eq!(pmf.lines().count(), 10);
    let kl: f64 = ok(&["oracle", "kl", "--tensor-file", t, "--beta1", "0.2", "--beta2", "0.2"]).trim().parse().unwrap();
    assert!(kl.abs() < 1e-12);
    let avg = ok(&["oracle", "avg-hsbm", "--p", "3", "--n", "20", "--beta", "0", "--lambda", "1", "--theta", "1"]);
    assert!(avg.lines().nth(1).unwrap().starts_with("0,"));
    let big = dir.path().join("big.txt");
    fs::write(&big, "2 40 cw\n").unwrap();
    let out = tising(&["oracle", "logZ", "--tensor-file", big.to_str().unwrap(), "--beta", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("22"));
}

#[test]
fn experiment_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.txt");
    fs::write(
        &manifest,
        "name = demo\nexperiment = coverage\nmodel = cw,p=2,n=200\nbeta = 0.8\nreplicates = 40\nseed = 2\noutput_dir = out\n",
    )
    .unwrap();
    let base = dir.path().to_str().unwrap();
    let listed = ok(&["experiment", "run", manifest.to_str().unwrap(), "--base", base]);
    assert_eq!(listed.lines().count(), 3);
    let out = dir.path().join("out");
    let csv = fs::read_to_string(out.join("demo.csv")).unwrap();
    assert_eq!(csv.lines().count(), 41);
    assert!(fs::read_to_string(out.join("demo.meta")).unwrap().contains("manifest_sha256"));
    assert!(fs::read_to_string(out.join("demo.summary.txt")).unwrap().contains("coverage"));
    ok(&["experiment", "run", manifest.to_str().unwrap(), "--base", base]);
    assert_eq!(fs::read_to_string(out.join("demo.csv")).unwrap(), csv);
}

#[test]
fn bad_inputs_fail_cleanly() {
    assert!(!tising(&["generate", "--model", "er,p=3,n=2", "--out", "/dev/null"]).status.success());
    assert!(!tising(&["sample", "--model", "cw,p=2,n=5", "--tensor-file", "x", "--beta", "1"]).status.success());
    assert!(!tising(&["generate", "--model", "cw,p=2,n=5", "--scale", "weird", "--out", "/dev/null"]).status.success());
}
