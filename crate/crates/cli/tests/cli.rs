//! End-to-end checks of the installed binary: exit codes, report
//! emission, config overrides, and determinism across worker counts.

use std::path::Path;
use std::process::{Command, Output};

fn gapflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, file: &str) -> Vec<u8> {
    std::fs::read(dir.join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

#[test]
fn passing_run_exits_zero_and_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let out = gapflow(&["verify-strong", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("strong_fit: PASS"));
    for file in ["strong_rhs.csv", "strong_rhs.json", "strong_fit.csv", "strong_fit.json"] {
        assert!(!read(dir.path(), file).is_empty());
    }
}

#[test]
fn unknown_config_keys_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = gapflow(&[
        "verify-weak",
        "--set",
        "sweep.caes=3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unknown field"), "stderr: {err}");
}

#[test]
fn config_file_and_overrides_compose() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[sweep]\ncases = 5\n\n[output]\nformats = [\"json\"]\n").unwrap();
    let out_dir = dir.path().join("reports");
    let out = gapflow(&[
        "verify-identities",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "sweep.cases=2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // 6 family sweeps at the overridden 2 cases each
    let text = String::from_utf8(read(&out_dir, "flux_checks.json")).unwrap();
    assert_eq!(text.matches("\"relError\"").count(), 12);
    assert!(!out_dir.join("flux_checks.csv").exists());
}

#[test]
fn failed_checks_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    // a globally rigid field fills the whole cylinder with shear, so the
    // fluid-restricted integral cannot control the full one at small gaps
    let out = gapflow(&[
        "lemma-cyl",
        "--set",
        "field.kind=\"rigid\"",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stdout).unwrap().contains("lemma_factor: FAIL"));
}

#[test]
fn inadmissible_collision_is_informational_not_failing() {
    let dir = tempfile::tempdir().unwrap();
    let out = gapflow(&[
        "collide",
        "--alpha",
        "1",
        "--theta",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(read(dir.path(), "collision_admissibility.json")).unwrap();
    assert!(text.contains("\"energyBounded\": false"));
    assert!(text.contains("\"convergent\": false"));
}

#[test]
fn emitted_floats_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = gapflow(&[
        "example4",
        "--set",
        "sweep.alphas=[1.0]",
        "--set",
        "sweep.h_windows=[[1e-3, 1e-1]]",
        "--set",
        "sweep.points=4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let json: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "example4_series.json")).unwrap();
    let rows = json.as_array().unwrap();
    assert_eq!(rows.len(), 8);

    let csv = String::from_utf8(read(dir.path(), "example4_series.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for (line, row) in lines.zip(rows) {
        for (name, cell) in header.iter().zip(line.split(',')) {
            let from_json = &row[*name];
            if let Some(expect) = from_json.as_f64() {
                let parsed: f64 = cell.parse().unwrap();
                assert_eq!(parsed.to_bits(), expect.to_bits(), "column {name}");
            } else {
                assert_eq!(cell, from_json.as_str().unwrap());
            }
        }
    }
}

#[test]
fn worker_count_does_not_change_report_bytes() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir8 = tempfile::tempdir().unwrap();
    let run = |dir: &Path, jobs: &str| {
        let out = gapflow(&[
            "verify-identities",
            "--set",
            "sweep.cases=6",
            "--jobs",
            jobs,
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(dir1.path(), "1");
    run(dir8.path(), "8");
    for file in ["flux_checks.csv", "flux_checks.json"] {
        assert_eq!(read(dir1.path(), file), read(dir8.path(), file), "{file}");
    }
}
