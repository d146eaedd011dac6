//! End-to-end tests of the `cylwig` binary: exit codes, strict config
//! rejection, and byte-level determinism of emitted artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cylwig"))
}

fn write(path: &Path, s: &str) {
    std::fs::write(path, s).unwrap();
}

const LIMIT_CFG: &str = r#"{
  "version": "1",
  "experiment": {
    "kind": "limit",
    "spec": {
      "state": {"type": "coherent", "modes": 1, "z": ["0.3", "-0.2"]},
      "points": [["0.5","0.1"],["-0.4","0.8"],["1.0","0.0"],["0.0","1.0"],["0.25","-0.75"]],
      "h_schedule": {"form": "geometric", "n": 22},
      "tol": "0.000001"
    }
  }
}"#;

fn run_limit(dir: &Path) -> Output {
    let cfg = dir.join("limit.json");
    write(&cfg, LIMIT_CFG);
    bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir)
        .output()
        .unwrap()
}

#[test]
fn limit_run_passes_and_is_byte_deterministic() {
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let o1 = run_limit(d1.path());
    assert_eq!(o1.status.code(), Some(0), "{}", String::from_utf8_lossy(&o1.stderr));
    let o2 = run_limit(d2.path());
    assert_eq!(o2.status.code(), Some(0));
    for name in ["limit_table.csv", "limit_summary.json"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    let csv = std::fs::read_to_string(d1.path().join("limit_table.csv")).unwrap();
    assert!(csv.starts_with("point_id,h,re,im\n"));
    assert!(!csv.contains(','.to_string().repeat(2).as_str()));
}

#[test]
fn unknown_field_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(&cfg, &LIMIT_CFG.replace("\"tol\"", "\"tolerance_extra\": \"1\", \"tol\""));
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("tolerance_extra"), "stderr was: {err}");
}

#[test]
fn wrong_version_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("v.json");
    write(&cfg, &LIMIT_CFG.replace("\"version\": \"1\"", "\"version\": \"7\""));
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("version"));
}

#[test]
fn validate_reports_ok_and_names_violations() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("limit.json");
    write(&cfg, LIMIT_CFG);
    let out = bin().args(["validate", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");

    // wrong point dimension → named, exit 1, no numerics run
    let bad = dir.path().join("bad.json");
    write(&bad, &LIMIT_CFG.replace(r#"["1.0","0.0"]"#, r#"["1.0","0.0","9.0"]"#));
    let out = bin().args(["validate", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.to_lowercase().contains("dimension") || err.contains("expected"), "stderr: {err}");
}

#[test]
fn bose_csv_schema_and_determinism() {
    let mut args = vec![
        "bose", "--dim", "3", "--omega", "1.0", "--beta-min", "300", "--beta-max", "600",
        "--beta-steps", "2", "--h-list", "0.001", "--f0-threshold", "0.05", "--out",
    ];
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for d in [d1.path(), d2.path()] {
        let mut a: Vec<&str> = args.clone();
        let p = d.to_str().unwrap();
        a.push(p);
        let out = bin().args(&a).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    args.pop();
    let a = std::fs::read(d1.path().join("bose_scan.csv")).unwrap();
    let b = std::fs::read(d2.path().join("bose_scan.csv")).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("d,omega,beta,h,mu_gap,f0,tail,beta_star_flag\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn cp_check_indefinite_weight_fails_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cp.json");
    write(
        &cfg,
        r#"{"version":"1","experiment":{"kind":"cp-check","spec":{
          "k":2,
          "terms":[{"measure":{"type":"dirac","modes":1,"p":["0.0","0.0"]},
                    "weight":[[["1.0","0.0"],["0.0","0.0"]],[["0.0","0.0"],["-1.0","0.0"]]]}],
          "points":[["0.1","0.2"],["-0.3","0.4"],["0.0","0.0"]],
          "tol":"0.000000000001"}}}"#,
    );
    let out = bin()
        .args(["cp-check", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("cp_check.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(false));
    assert_eq!(v["weights_psd"], serde_json::Value::Bool(false));
    assert!(v["min_eig"].as_f64().unwrap() < -0.5);
}

#[test]
fn threads_env_fallback_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("limit.json");
    write(&cfg, LIMIT_CFG);
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .env("CYLWIG_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_config_file_is_input_error() {
    let out = bin()
        .args(["run", "--config", "/nonexistent/nope.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
