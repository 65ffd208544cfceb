//! Runs `tractrix verify-all` twice and reports one line per acceptance
//! criterion. Criterion 11 is judged on the two runs: byte-identical data files and
//! manifests equal once timing lines are dropped.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use tractrix_cli::manifest::without_timing;

const CONFIG: &str = "# acceptance suite at desk scale\nseed = 1\n";

struct Run {
    stdout: String,
    seconds: f64,
    manifest: String,
}

fn verify_all(dir: &Path) -> Run {
    let config = dir.join("verify.conf");
    std::fs::write(&config, CONFIG).unwrap();
    let out = dir.join("out");
    let start = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_tractrix"))
        .args(["verify-all", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("tractrix runs");
    let seconds = start.elapsed().as_secs_f64();
    let stdout = String::from_utf8_lossy(&output.stdout).into_owned();
    assert!(
        output.status.code().is_some(),
        "verify-all was killed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    Run {
        stdout,
        seconds,
        manifest: std::fs::read_to_string(out.join("manifest.txt")).expect("manifest written"),
    }
}

/// `[check cNN]` block of a manifest as key/value pairs.
fn check_block(manifest: &str, id: &str) -> BTreeMap<String, String> {
    let header = format!("[check {id}]");
    manifest
        .lines()
        .skip_while(|l| *l != header)
        .skip(1)
        .take_while(|l| !l.starts_with('['))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn data_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "json" || e == "svg"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

/// Written straight to stderr so the lines show up without `--nocapture`.
macro_rules! report {
    ($($arg:tt)*) => {
        let _ = writeln!(std::io::stderr().lock(), $($arg)*);
    };
}

#[test]
fn acceptance() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = verify_all(a.path());
    let second = verify_all(b.path());

    let mut failed = Vec::new();
    for n in 1..=10 {
        let id = format!("c{n:02}");
        let block = check_block(&first.manifest, &id);
        let passed = block.get("passed").map(String::as_str) == Some("true");
        let line = first
            .stdout
            .lines()
            .find(|l| l.contains(&format!("] {id} ")))
            .unwrap_or("(no summary line)");
        report!("criterion {n:>2}: {} | {line}", if passed { "pass" } else { "FAIL" });
        if !passed {
            failed.push(n);
        }
    }

    let (csv_a, csv_b) = (data_files(&a.path().join("out")), data_files(&b.path().join("out")));
    let differing: Vec<&String> = csv_a.keys().filter(|k| csv_a.get(*k) != csv_b.get(*k)).collect();
    let same_names = csv_a.keys().eq(csv_b.keys());
    let manifests_equal = without_timing(&first.manifest) == without_timing(&second.manifest);
    let in_process = check_block(&first.manifest, "c11").get("passed").map(String::as_str) == Some("true");
    let c11 = same_names && differing.is_empty() && manifests_equal && in_process && !csv_a.is_empty();
    report!(
        "criterion 11: {} | {} CSV, JSON and SVG files compared, {} differ; manifests equal modulo timing: {manifests_equal}; in-process check: {in_process}",
        if c11 { "pass" } else { "FAIL" },
        csv_a.len(),
        differing.len()
    );
    if !c11 {
        failed.push(11);
    }
    report!("verify-all wall time: {:.1} s and {:.1} s (limit 300 s each)", first.seconds, second.seconds);

    assert!(failed.is_empty(), "failed criteria: {failed:?}\n{}", first.manifest);
    assert!(first.seconds < 300.0 && second.seconds < 300.0);
}
