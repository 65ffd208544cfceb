//! Exit codes, flag overrides and output files of the individual commands.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tractrix(dir: &Path, command: &str, config: &str, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = dir.join(format!("{command}.conf"));
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join(format!("out_{command}"));
    let output = Command::new(env!("CARGO_BIN_EXE_tractrix"))
        .arg(command)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    (output, out)
}

const ORACLE: &str = "space = line\ngamma_from = 0\ngamma_to = 5\nradius = 1\nstart = 0\nexpect_end = 4\n";

#[test]
fn oracle_run_writes_its_files() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = tractrix(dir.path(), "run", ORACLE, &["--delta", "1e-3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x0\n0,0\n"));
    let last: f64 = csv.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - 4.0).abs() <= 2e-3);
    assert!(std::fs::read_to_string(out.join("trajectory.svg")).unwrap().starts_with("<svg"));
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("delta = 1e-3") || manifest.contains("delta = 0.001"));
    assert!(manifest.contains("all_passed = true"));
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = tractrix(dir.path(), "run", &format!("{ORACLE}delta = 0.5\n"), &["--delta", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 501);
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = tractrix(dir.path(), "run", "spaec = line\n", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
    let (o, _) = tractrix(dir.path(), "flow", "family = cubic\n", &[]);
    assert_eq!(o.status.code(), Some(1));
    let (o, _) = tractrix(dir.path(), "run", ORACLE, &["--delta", "-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn preconditions_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = tractrix(dir.path(), "run", "space = euclidean\ngamma_from = 0, 0\ngamma_to = 0, 0\nstart = 3, 1\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition"));
    let (o, _) = tractrix(dir.path(), "flow", "family = quadratic\nstart = 5, 0, 0\n", &[]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn corrupted_trajectory_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = tractrix(dir.path(), "flow", "family = drag\ncorrupt = 10\n", &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL] evi"));
    let evi = std::fs::read_to_string(out.join("evi.json")).unwrap();
    assert!(evi.contains("\"passed\": false"));
    let (o, _) = tractrix(dir.path(), "flow", "family = drag\n", &[]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn stationary_driver_gives_a_flat_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = tractrix(dir.path(), "run", "space = euclidean\ngamma_from = 0, 0\ngamma_to = 0, 0\nstart = 0.3, 0.4\n", &[]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0.3,0.4")));
}

#[test]
fn cone_pipeline_summary_carries_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = tractrix(dir.path(), "retract", "pipeline = cone\npairs = 2000\n", &["--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(out.join("lipschitz.csv")).unwrap();
    assert!(csv.starts_with("pair,d_before,d_after,ratio,displacement\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("lipschitz.json")).unwrap()).unwrap();
    assert!(summary["max_ratio"].as_f64().unwrap() <= summary["max_ratio_tolerance"].as_f64().unwrap());
    assert_eq!(summary["tolerance_formula"], "1e-6");
}

#[test]
fn tightened_tolerances_list_failures() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "tolerance_scale = 0.1\nc3_pairs = 40\nc4_pairs = 200\nc7_pairs = 6\nc8_pairs = 6\nc8_probes = 6\nc9_pairs = 400\nc10_probes = 4\n";
    let (o, out) = tractrix(dir.path(), "verify-all", cfg, &[]);
    assert_eq!(o.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("[FAIL] c02"), "{stdout}");
    assert!(stdout.contains("[FAIL] c05"), "{stdout}");
    assert!(std::fs::read_to_string(out.join("manifest.txt")).unwrap().contains("all_passed = false"));
}
