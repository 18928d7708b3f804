use std::path::Path;
use std::process::{Command, Output};

use cqm_cli::report::RunReport;

fn cqm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqm")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

fn report(dir: &Path) -> RunReport {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn list_prints_the_registry() {
    let tmp = tempfile::tempdir().unwrap();
    let out = cqm(&["list"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), cqm_cli::registry::REGISTRY.len());
    for line in text.lines() {
        assert!(line.split_whitespace().count() >= 3, "{line}");
    }
}

#[test]
fn verify_cocycle_suite_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"schema_version": 1, "kind": "verify-cocycle", "seed": 42, "output_dir": "o", "params": {"verify-cocycle": {"probes": 10000}}}"#);
    let out = cqm(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&tmp.path().join("o"));
    assert!(r.passed);
    assert_eq!(r.environment.seed, 42);
    assert!(r.check("cocycle-identity").unwrap().residual.unwrap() < 1e-10);
    let csv = std::fs::read_to_string(tmp.path().join("o/cocycle-identity/residuals.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10_001);
}

#[test]
fn negative_tolerance_is_a_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"schema_version": 1, "kind": "hpf", "tolerances": {"hamilton-jacobi": -1e-6}}"#);
    let out = cqm(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema error"));
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(cqm(&["run", "missing.json"], tmp.path()).status.code(), Some(2));
    let cfg = write(tmp.path(), "bad.json", "{not json");
    assert_eq!(cqm(&["run", &cfg], tmp.path()).status.code(), Some(2));
    let cfg = write(tmp.path(), "noseed.json", r#"{"schema_version": 1, "kind": "classical"}"#);
    assert_eq!(cqm(&["run", &cfg], tmp.path()).status.code(), Some(2));
    let cfg = write(tmp.path(), "kind.json", r#"{"schema_version": 1, "kind": "warp", "seed": 1}"#);
    assert_eq!(cqm(&["run", &cfg], tmp.path()).status.code(), Some(2));
    let cfg = write(tmp.path(), "tolname.json", r#"{"schema_version": 1, "kind": "hpf", "tolerances": {"no-such-check": 1.0}}"#);
    assert_eq!(cqm(&["run", &cfg], tmp.path()).status.code(), Some(2));
    let cfg = write(tmp.path(), "ok.json", r#"{"schema_version": 1, "kind": "hpf"}"#);
    assert_eq!(cqm(&["run", &cfg, "--tol-scale", "-1"], tmp.path()).status.code(), Some(2));
}

#[test]
fn failed_checks_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"schema_version": 1, "kind": "hpf", "output_dir": "o"}"#);
    let out = cqm(&["run", &cfg, "--tol-scale", "1e-12"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let r = report(&tmp.path().join("o"));
    assert!(!r.passed);
    assert_eq!(r.environment.tol_scale, 1e-12);
}

#[test]
fn overrides_and_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"schema_version": 1, "kind": "pathint", "seed": 1, "output_dir": "ignored"}"#);
    let out = cqm(&["run", &cfg, "--seed", "9", "--out", "elsewhere"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!tmp.path().join("ignored").exists());
    let dir = tmp.path().join("elsewhere");
    let r = report(&dir);
    assert_eq!(r.environment.seed, 9);
    let k = r.check("kernel-error").unwrap();
    assert!(k.residual.unwrap() < 1e-2 && k.tolerance == 1e-2);
    let csv = std::fs::read_to_string(dir.join("path-integral/kernel_slice.csv")).unwrap();
    assert!(csv.starts_with("x,abs_k,arg_k\n"));
    let bin = std::fs::read(dir.join("path-integral/kernel.cqmw")).unwrap();
    assert_eq!(&bin[..4], b"CQMW");
    assert!(r.timing.contains_key("path-integral") && r.timing.contains_key("total"));
}

#[test]
fn reports_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"schema_version": 1, "kind": "dress", "seed": 5, "params": {"dress": {"probes": 10, "points": 64}}}"#);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert!(cqm(&["run", &cfg, "--out", "a"], tmp.path()).status.success());
    assert!(cqm(&["run", &cfg, "--out", "b"], tmp.path()).status.success());
    assert_eq!(report(&a).deterministic_json(), report(&b).deterministic_json());
    let c = tmp.path().join("c");
    let _ = cqm(&["run", &cfg, "--out", "c", "--seed", "6"], tmp.path());
    assert_ne!(report(&a).deterministic_json(), report(&c).deterministic_json());
}
