//! Runs the `latnorm` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn latnorm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latnorm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_instance(dir: &Path) {
    std::fs::write(
        dir.join("spec.json"),
        r#"{"n":4,"bound":5,"norm":{"kind":"lp","p":"inf"},"target":true}"#,
    )
    .unwrap();
    let out = latnorm(dir, &["generate", "--spec", "spec.json", "--seed", "3", "--out", "inst.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(dir.path());
    let first = std::fs::read(dir.path().join("inst.json")).unwrap();
    write_instance(dir.path());
    assert_eq!(first, std::fs::read(dir.path().join("inst.json")).unwrap());
}

#[test]
fn reduce_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_instance(d);
    let out = latnorm(d, &["oracle", "--instance", "inst.json", "--out", "opt.json"]);
    assert!(out.status.success());
    let opt = json(&d.join("opt.json"))["value"].as_f64().unwrap();
    for mode in ["svp-cvp2", "cvp-sieve2"] {
        let out = latnorm(
            d,
            &["reduce", "--mode", mode, "--instance", "inst.json", "--seed", "7", "--budget", "8", "--report", "r.json"],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let r = json(&d.join("r.json"));
        assert_eq!(r["mode"], mode);
        assert!(r["achievedFactor"].as_f64().unwrap() >= 1.0 - 1e-9);
        if mode == "svp-cvp2" {
            assert!(r["value"].as_f64().unwrap() >= opt - 1e-9);
        }
    }
}

#[test]
fn suite_writes_valid_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("suite.json"),
        r#"{"suite":"t","instances":[{"n":3,"bound":4,"norm":{"kind":"lp","p":"inf"},"count":2}],
            "modes":["svp-cvp2"],"epsilon":0.25,"seeds":[0,1],"repetition_budget":4}"#,
    )
    .unwrap();
    let out = latnorm(d, &["suite", "--config", "suite.json", "--threads", "1", "--out", "rep.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    latnorm::harness::validate_report(&json(&d.join("rep.json"))).unwrap();
    let csv = std::fs::read_to_string(d.join("rep.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), latnorm::harness::CSV_COLUMNS.join(","));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn ellipsoid_and_kissing() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("l2.json"), r#"{"kind":"lp","p":2}"#).unwrap();
    let out = latnorm(d, &["ellipsoid", "--norm", "l2.json", "--dim", "3", "--certify-budget", "2000", "--out", "e.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let e = json(&d.join("e.json"));
    assert!(e["certification"].is_object());
    assert_eq!(e["T_eps"].as_array().unwrap().len(), 3);
    let out = latnorm(d, &["kissing", "--norm", "l2.json", "--dim", "2", "--out", "k.json"]);
    assert!(out.status.success());
    assert_eq!(json(&d.join("k.json"))["count"], 6);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_instance(d);
    // missing normQ is a validation error
    let out = latnorm(d, &["reduce", "--mode", "svp-cvpQ", "--instance", "inst.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = latnorm(d, &["reduce", "--mode", "nope", "--instance", "inst.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = latnorm(d, &["oracle", "--instance", "missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(d.join("l2.json"), r#"{"kind":"lp","p":2}"#).unwrap();
    let out = latnorm(d, &["ellipsoid", "--norm", "l2.json"]);
    assert_eq!(out.status.code(), Some(2));
}
