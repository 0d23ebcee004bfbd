//! End-to-end tests of the `prs` binary: exit codes, file formats, and the
//! byte-identical determinism guarantee (acceptance criterion 10).

use std::path::PathBuf;
use std::process::{Command, Output};

fn prs() -> Command {
    Command::new(env!("CARGO_BIN_EXE_prs"))
}

fn run(args: &[&str]) -> Output {
    prs().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("prs-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn sample_detect_recover_pipeline() {
    let inst = tmp("pipeline-inst.txt");
    let est = tmp("pipeline-est.txt");
    let out = run(&[
        "sample",
        "--n",
        "30",
        "--k",
        "10",
        "--p",
        "0.9",
        "--q",
        "0.5",
        "--seed",
        "41",
        "--model",
        "planted",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&inst).unwrap();
    assert!(text.starts_with("n 30\n"));
    assert!(text.contains("\nS ") && text.contains("\npi "));

    let out = run(&[
        "detect",
        "--algo",
        "degree2",
        "--in",
        inst.to_str().unwrap(),
        "--n",
        "30",
        "--k",
        "10",
        "--p",
        "0.9",
        "--q",
        "0.5",
        "--seed",
        "41",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["decision"] == "planted" || report["decision"] == "null");

    let out = run(&[
        "recover",
        "--algo",
        "spectral_recover",
        "--in",
        inst.to_str().unwrap(),
        "--n",
        "30",
        "--k",
        "10",
        "--p",
        "0.9",
        "--q",
        "0.5",
        "--seed",
        "41",
        "--out",
        est.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["d_hamming"].is_u64() && report["d_kt"].is_u64());
    let est_text = std::fs::read_to_string(&est).unwrap();
    assert!(est_text.starts_with("n 30\n"));
    let _ = std::fs::remove_file(&inst);
    let _ = std::fs::remove_file(&est);
}

#[test]
fn exponent_flags_match_direct_parameters() {
    // n = 256: alpha = 0.25 -> q = 0.25, beta = 0.75 -> k = 64,
    // gamma = 0.125 -> p = 0.5.
    let a = run(&[
        "sample", "--n", "256", "--alpha", "0.25", "--beta", "0.75", "--gamma", "0.125", "--seed",
        "9", "--model", "null",
    ]);
    let b = run(&[
        "sample", "--n", "256", "--k", "64", "--p", "0.5", "--q", "0.25", "--seed", "9", "--model",
        "null",
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_arguments_exit_two() {
    // Mixed parameterizations.
    let out = run(&[
        "sample", "--n", "10", "--k", "3", "--p", "0.5", "--q", "0.2", "--alpha", "0.5", "--beta",
        "0.5", "--gamma", "0.5", "--seed", "1", "--model", "null",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Out-of-range q.
    let out = run(&[
        "sample", "--n", "10", "--k", "3", "--p", "0.5", "--q", "0.9", "--seed", "1", "--model",
        "null",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Missing --seed is a usage error (clap default exit code 2).
    let out = run(&[
        "sample", "--n", "10", "--k", "3", "--p", "0.5", "--q", "0.2", "--model", "null",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // Bad sweep config.
    let cfg = tmp("bad-config.json");
    std::fs::write(&cfg, r#"{"alpha":{"min":0.0,"max":0.5,"steps":2},"beta":{"min":0.5,"max":0.5,"steps":1},"gamma":{"min":0.5,"max":0.5,"steps":1},"n":[50],"trials":1,"algorithms":["degree2"]}"#).unwrap();
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "1",
        "--out",
        "/tmp/x",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(&cfg);
}

#[test]
fn algorithm_failure_exits_three() {
    // Exhaustive detection is capped at n = 16.
    let out = run(&[
        "detect",
        "--algo",
        "exhaustive",
        "--model",
        "null",
        "--n",
        "20",
        "--k",
        "5",
        "--p",
        "0.5",
        "--q",
        "0.2",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // Ordered-clique recovery on a non-tournament (p < 1).
    let out = run(&[
        "recover",
        "--algo",
        "ordered_clique",
        "--n",
        "30",
        "--k",
        "10",
        "--p",
        "0.5",
        "--q",
        "0.5",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn sweep_config_text(out_prefix: &str) -> String {
    format!(
        r#"{{
  "alpha": {{"min": 0.45, "max": 0.65, "steps": 2}},
  "beta": {{"min": 0.85, "max": 0.85, "steps": 1}},
  "gamma": {{"min": 0.05, "max": 0.05, "steps": 1}},
  "n": [60],
  "trials": 3,
  "algorithms": ["degree2", "rbw", "spectral_recover"],
  "out": "{out_prefix}"
}}"#
    )
}

/// Acceptance criterion 10: any CLI invocation repeated with identical
/// configuration and seed produces byte-identical output files.
#[test]
fn repeated_invocations_are_byte_identical() {
    // sample: run twice into two files.
    let s1 = tmp("det-sample-1.txt");
    let s2 = tmp("det-sample-2.txt");
    for path in [&s1, &s2] {
        let out = run(&[
            "sample",
            "--n",
            "80",
            "--k",
            "20",
            "--p",
            "0.7",
            "--q",
            "0.3",
            "--seed",
            "1234",
            "--model",
            "planted",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&s1).unwrap(), std::fs::read(&s2).unwrap());

    // sweep: run twice (different worker counts) and compare CSV + summary.
    let cfg = tmp("det-config.json");
    let p1 = tmp("det-sweep-1");
    let p2 = tmp("det-sweep-2");
    std::fs::write(&cfg, sweep_config_text("unused")).unwrap();
    for (prefix, workers) in [(&p1, "1"), (&p2, "4")] {
        let out = run(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "99",
            "--out",
            prefix.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let csv1 = std::fs::read(p1.with_extension("csv")).unwrap();
    let csv2 = std::fs::read(p2.with_extension("csv")).unwrap();
    assert_eq!(csv1, csv2, "sweep CSVs differ between repeated runs");
    let sum1 = std::fs::read(p1.with_extension("summary.json")).unwrap();
    let sum2 = std::fs::read(p2.with_extension("summary.json")).unwrap();
    assert_eq!(sum1, sum2, "sweep summaries differ between repeated runs");

    // recover: identical estimate files from repeated runs.
    let e1 = tmp("det-est-1.txt");
    let e2 = tmp("det-est-2.txt");
    for path in [&e1, &e2] {
        let out = run(&[
            "recover",
            "--algo",
            "rbw",
            "--n",
            "90",
            "--k",
            "90",
            "--p",
            "1",
            "--q",
            "0.2",
            "--seed",
            "77",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&e1).unwrap(), std::fs::read(&e2).unwrap());
    let _ = std::fs::remove_file(&e1);
    let _ = std::fs::remove_file(&e2);

    // detect: identical reports.
    let d1 = run(&[
        "detect", "--algo", "spectral", "--model", "planted", "--n", "120", "--k", "120", "--p",
        "1", "--q", "0.4", "--seed", "7",
    ]);
    let d2 = run(&[
        "detect", "--algo", "spectral", "--model", "planted", "--n", "120", "--k", "120", "--p",
        "1", "--q", "0.4", "--seed", "7",
    ]);
    assert!(d1.status.success());
    assert_eq!(d1.stdout, d2.stdout);

    for f in [
        s1,
        s2,
        cfg,
        p1.with_extension("csv"),
        p1.with_extension("summary.json"),
        p2.with_extension("csv"),
        p2.with_extension("summary.json"),
    ] {
        let _ = std::fs::remove_file(f);
    }
}

#[test]
fn sweep_csv_parses_back_and_counts_match() {
    let cfg = tmp("parse-config.json");
    let prefix = tmp("parse-sweep");
    std::fs::write(&cfg, sweep_config_text("unused")).unwrap();
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "5",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    let rows = prs_cli::sweep::parse_csv(&text).unwrap();
    // 2 cells x 3 trials x (2 + 1 + 1) = 24 rows.
    assert_eq!(rows.len(), 24);
    let summary: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(prefix.with_extension("summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary["total_rows"], 24);
    assert_eq!(summary["expected_rows"], 24);
    assert_eq!(summary["base_seed"], 5);
    assert!(summary["cells"].as_array().unwrap().len() == 2);
    for f in [
        cfg,
        prefix.with_extension("csv"),
        prefix.with_extension("summary.json"),
    ] {
        let _ = std::fs::remove_file(f);
    }
}

#[test]
fn seed_must_come_from_somewhere() {
    let cfg = tmp("noseed-config.json");
    std::fs::write(&cfg, sweep_config_text("unused")).unwrap();
    // No --seed and no base_seed in the config: exit 2.
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/tmp/x",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(&cfg);
}
