// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cpd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpd"))
        .args(args)
        .env_remove("CPD_SEED")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("x.csv");
    let truth = dir.path().join("t.json");
    let out = cpd(&[
        "generate",
        "--out-series",
        s(&series),
        "--out-truth",
        s(&truth),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&series).unwrap().lines().count(), 30_000);
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&truth).unwrap()).unwrap();
    assert_eq!(t["thetas"].as_array().unwrap().len(), 4);
    assert_eq!(t["labels"], serde_json::json!([1, 2, 3, 1, 2]));
    assert_eq!(t["seed"], 1);
}

#[test]
fn generate_without_changes() {
    let dir = tempfile::tempdir().unwrap();
    let truth = dir.path().join("t.json");
    let out = cpd(&[
        "generate",
        "--n",
        "1000",
        "--kappa",
        "0",
        "--r",
        "1",
        "--out-series",
        s(&dir.path().join("x.csv")),
        "--out-truth",
        s(&truth),
    ]);
    assert!(out.status.success());
    let t: serde_json::Value = serde_json::from_str(&fs::read_to_string(&truth).unwrap()).unwrap();
    assert_eq!(t["thetas"], serde_json::json!([]));
}

#[test]
fn infeasible_generation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpd(&[
        "generate",
        "--lambda-min",
        "0.3",
        "--kappa",
        "4",
        "--out-series",
        s(&dir.path().join("x.csv")),
        "--out-truth",
        s(&dir.path().join("t.json")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stderr).lines().count(), 1);
}

#[test]
fn detect_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("x.csv");
    let truth = dir.path().join("t.json");
    let est = dir.path().join("e.json");
    assert!(cpd(&[
        "generate",
        "--n",
        "10000",
        "--out-series",
        s(&series),
        "--out-truth",
        s(&truth)
    ])
    .status
    .success());
    let out = cpd(&[
        "detect",
        "--in-series",
        s(&series),
        "--lambda",
        "0.06",
        "--r",
        "3",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["kappa_hat"].is_u64());
    fs::write(&est, &out.stdout).unwrap();
    let out = cpd(&["evaluate", "--truth", s(&truth), "--estimate", s(&est)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("error: "));
}

#[test]
fn detect_single_block_with_one_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("x.csv");
    let values: Vec<String> = (0..5000)
        .map(|i| ((i * 7919) % 10007) as f64 / 10007.0)
        .map(|v| v.to_string())
        .collect();
    fs::write(&series, values.join("\n")).unwrap();
    let out = cpd(&[
        "detect",
        "--in-series",
        s(&series),
        "--lambda",
        "0.1",
        "--r",
        "1",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kappa_hat"], 0);
}

#[test]
fn detect_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let run = |path: &Path, lambda: &str, r: &str| {
        cpd(&[
            "detect",
            "--in-series",
            s(path),
            "--lambda",
            lambda,
            "--r",
            r,
        ])
        .status
        .code()
    };
    assert_eq!(run(&empty, "0.1", "2"), Some(2));
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "0.1\nabc\n").unwrap();
    assert_eq!(run(&bad, "0.1", "2"), Some(2));
    let wide = dir.path().join("wide.csv");
    fs::write(&wide, "0.1,0.2\n").unwrap();
    assert_eq!(run(&wide, "0.1", "2"), Some(2));
    let ok = dir.path().join("ok.csv");
    let values: Vec<String> = (0..200).map(|i| (i as f64 / 200.0).to_string()).collect();
    fs::write(&ok, values.join("\n")).unwrap();
    assert_eq!(run(&ok, "1.5", "2"), Some(2));
    assert_eq!(run(&missing(&dir), "0.1", "2"), Some(2));
    // Too few segments for the requested number of clusters.
    assert_eq!(run(&ok, "0.3", "10"), Some(3));
}

fn missing(dir: &tempfile::TempDir) -> std::path::PathBuf {
    dir.path().join("missing.csv")
}

#[test]
fn unknown_flags_exit_2() {
    assert_eq!(cpd(&["detect", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        cpd(&[
            "detect",
            "--in-series",
            "x",
            "--lambda",
            "0.1",
            "--r",
            "1",
            "--m-max",
            "zero"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn sweep_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let out = cpd(&[
        "sweep",
        "--trials",
        "2",
        "--n-grid",
        "5000",
        "--out-csv",
        s(&csv),
        "--out-svg",
        s(&svg),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n,trials,mean_error,std_error,kappa_accuracy,baseline_mean_error"
    );
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("5000,2,"));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn sweep_rejects_bad_grid_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    assert_eq!(
        cpd(&[
            "sweep",
            "--trials",
            "1",
            "--n-grid",
            "10",
            "--out-csv",
            s(&csv)
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        cpd(&[
            "sweep",
            "--trials",
            "0",
            "--n-grid",
            "5000",
            "--out-csv",
            s(&csv)
        ])
        .status
        .code(),
        Some(2)
    );
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"lambda": 0.06, "unknown": 1}"#).unwrap();
    assert_eq!(
        cpd(&["sweep", "--config", s(&cfg), "--out-csv", s(&csv)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sweep_reads_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let cfg = dir.path().join("c.json");
    fs::write(
        &cfg,
        r#"{"n_grid": [4000, 5000], "trials": 1, "lambda": 0.08}"#,
    )
    .unwrap();
    let out = cpd(&["sweep", "--config", s(&cfg), "--out-csv", s(&csv)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 3);
}

#[test]
fn seed_variable_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |name: &str, seed: &str, env: Option<&str>| {
        let path = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_cpd"));
        cmd.args([
            "generate",
            "--n",
            "2000",
            "--seed",
            seed,
            "--out-series",
            s(&path),
            "--out-truth",
            s(&dir.path().join("t.json")),
        ]);
        match env {
            Some(v) => cmd.env("CPD_SEED", v),
            None => cmd.env_remove("CPD_SEED"),
        };
        assert!(cmd.status().unwrap().success());
        fs::read(path).unwrap()
    };
    let a = gen("a.csv", "5", None);
    let b = gen("b.csv", "9", Some("5"));
    let c = gen("c.csv", "9", None);
    assert_eq!(a, b);
    assert_ne!(a, c);
}
