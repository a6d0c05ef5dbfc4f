use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gaussent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussent"))
        .args(args)
        .output()
        .unwrap()
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sample_writes_rows_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let out = gaussent(&[
        "sample",
        "--measure",
        "microcanonical",
        "--n",
        "5",
        "--energy",
        "50",
        "--samples",
        "120",
        "--seed",
        "3",
        "--out",
        path(&csv),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("index,entropy,inv_purity,total_energy,nu,invariants"));
    assert_eq!(text.lines().count(), 121);
    let sidecar: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert!(sidecar["code_version"]
        .as_str()
        .unwrap()
        .starts_with("gaussent"));
    assert_eq!(sidecar["config"]["seed"], 3);
    assert_eq!(sidecar["config"]["measure"]["measure"], "microcanonical");
    assert!(
        sidecar["max_entropy"].as_f64().unwrap() > sidecar["entropy"]["mean"].as_f64().unwrap()
    );
}

#[test]
fn sample_is_reproducible() {
    let args = [
        "sample",
        "--measure",
        "canonical",
        "--n",
        "4",
        "--m",
        "2",
        "--temperature",
        "2",
        "--samples",
        "64",
    ];
    let a = gaussent(&args);
    let b = gaussent(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn histogram_uses_sidecar_range() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("run.csv");
    let run = gaussent(&[
        "sample",
        "--measure",
        "microcanonical",
        "--n",
        "4",
        "--energy",
        "30",
        "--samples",
        "200",
        "--out",
        path(&csv),
    ]);
    assert!(run.status.success());
    let sidecar: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    let smax = sidecar["max_entropy"].as_f64().unwrap();
    let h = json_stdout(&gaussent(&[
        "histogram",
        "--input",
        path(&csv),
        "--bins",
        "8",
        "--format",
        "json",
    ]));
    let edges = h["histogram"]["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 9);
    assert_eq!(edges[8].as_f64().unwrap(), smax);
    let counts: u64 = h["histogram"]["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(counts, 200);
}

#[test]
fn analytics_reports_value_and_units() {
    let v = json_stdout(&gaussent(&[
        "analytics",
        "--formula",
        "page",
        "--m",
        "2",
        "--n",
        "3",
    ]));
    assert_eq!(v["units"], "nats");
    assert!((v["value"].as_f64().unwrap() - 0.45).abs() < 1e-12);

    let v = json_stdout(&gaussent(&[
        "analytics",
        "--formula",
        "microcanonical",
        "--n",
        "5",
        "--energy",
        "60",
    ]));
    assert!((v["value"]["std_distance_to_max"].as_f64().unwrap() - 16.5).abs() < 0.1);

    let v = json_stdout(&gaussent(&[
        "analytics",
        "--formula",
        "h",
        "--x",
        "3",
        "--log-base",
        "2",
    ]));
    assert_eq!(v["units"], "bits");
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn bounds_bracket_is_ordered() {
    let v = json_stdout(&gaussent(&[
        "bounds", "--n", "4", "--energy", "16", "-M", "500",
    ]));
    assert_eq!(v["M"], 500);
    assert!(v["lower"].as_f64().unwrap() < v["upper"].as_f64().unwrap());
    assert!(!v["active_bins"]["upper"].as_array().unwrap().is_empty());
}

#[test]
fn scans_emit_tables_and_fits() {
    let v = json_stdout(&gaussent(&[
        "scan-concentration",
        "--measure",
        "microcanonical",
        "--energy-per-mode",
        "6",
        "--n",
        "4,8,12",
        "--samples",
        "100",
        "--format",
        "json",
    ]));
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    assert!(v["fit"]["slope"].as_f64().unwrap() < 0.0);

    let out = gaussent(&[
        "scan-mdep",
        "--measure",
        "canonical",
        "--temperature",
        "2",
        "--n",
        "4,6",
        "--m",
        "1,5",
        "--samples",
        "50",
    ]);
    assert!(out.status.success());
    // m = 5 exceeds n = 4 and is skipped
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 4);
}

#[test]
fn exit_codes() {
    assert_eq!(gaussent(&["sample", "--bogus"]).status.code(), Some(1));
    assert_eq!(gaussent(&["--help"]).status.code(), Some(0));
    assert_eq!(
        gaussent(&["bounds", "--n", "2", "--energy", "10"])
            .status
            .code(),
        Some(1)
    );
    let out = gaussent(&[
        "sample",
        "--measure",
        "canonical",
        "--n",
        "3",
        "--energy",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
