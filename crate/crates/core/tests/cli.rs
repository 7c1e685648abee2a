use std::fs;

use qsparse::bench::{read_results, ResultFormat, Status, CSV_HEADER};
use qsparse::cli::run_cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("qsparse").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn without_timing(report: &str) -> String {
    report.lines().filter(|l| !l.starts_with("time:")).collect::<Vec<_>>().join("\n")
}

#[test]
fn run_superposition_on_store() {
    let (code, out, err) = run(&["run", "--gen", "superposition", "--n", "4", "--r", "2", "--backend", "store"]);
    assert_eq!(code, 0, "{err}");
    assert!(err.is_empty());
    assert!(out.contains("support: 4\n"));
    assert_eq!(out.matches("p=0.250000000").count(), 4);
}

#[test]
fn run_grover_mixed() {
    let (code, out, err) =
        run(&["run", "--gen", "grover", "--r", "3", "--iters", "2", "--backend", "mixed", "--measure", "0@search"]);
    assert_eq!(code, 0, "{err}");
    let line = out.lines().find(|l| l.starts_with("measure 0@search:")).unwrap();
    let p: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((p - 0.9453125).abs() < 1e-9);
    assert!(out.contains("backend: mixed -> store"));
}

#[test]
fn dense_over_cap_exits_3() {
    let (code, out, err) = run(&["run", "--gen", "superposition", "--n", "30", "--r", "2", "--backend", "dense"]);
    assert_eq!(code, 3);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    let (code, _, _) =
        run(&["run", "--gen", "superposition", "--n", "8", "--r", "2", "--backend", "dense", "--dense-cap", "6"]);
    assert_eq!(code, 3);
}

#[test]
fn reports_are_reproducible() {
    let args = ["run", "--gen", "addition", "--k", "3", "--r", "6", "--backend", "array", "--seed", "42", "--drop-limit", "20"];
    let (_, a, _) = run(&args);
    let (_, b, _) = run(&args);
    assert_eq!(without_timing(&a), without_timing(&b));
    assert!(a.contains("support: 20\n"));
    assert!(a.contains("sample (seed 42)"));
}

#[test]
fn missing_circuit_file_exits_4() {
    let (code, _, err) = run(&["run", "--circuit", "/nonexistent/c.json"]);
    assert_eq!(code, 4);
    assert!(err.starts_with("qsparse: "));
}

#[test]
fn malformed_circuit_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"n_qubits":2,"gates":[{"kind":"h","q":9}]}"#).unwrap();
    let (code, _, err) = run(&["run", "--circuit", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("gate 0"));
}

#[test]
fn export_then_run_matches_direct_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sup.json");
    let path = path.to_str().unwrap();
    assert_eq!(run(&["export", "--gen", "superposition", "--n", "4", "--r", "4", "--out", path]).0, 0);
    let (_, from_file, _) = run(&["run", "--circuit", path]);
    let (_, direct, _) = run(&["run", "--gen", "superposition", "--n", "4", "--r", "4"]);
    assert_eq!(without_timing(&from_file), without_timing(&direct));
}

#[test]
fn export_addition_width() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("add.json");
    let (code, _, _) = run(&["export", "--gen", "addition", "--k", "3", "--r", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["n_qubits"], 14);
    let (code, _, err) = run(&["export", "--gen", "addition", "--k", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn bench_grid_is_upper_triangular() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let (code, out, err) = run(&[
        "bench", "--suite", "superposition", "--n-max", "12", "--repeats", "1", "--backends", "array,dense",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("wrote "));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let points = read_results(ResultFormat::Csv, text.as_bytes()).unwrap();
    let cells: usize = (1..=12).map(|n| n + 1).sum();
    assert_eq!(points.len(), 2 * cells);
    assert!(points.iter().all(|p| p.nondet_qubits <= p.total_qubits && p.status == Status::Ok));
}

#[test]
fn bench_drop_study_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let (code, _, err) =
        run(&["bench", "--suite", "drop-superposition", "--n", "12", "--repeats", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let points = read_results(ResultFormat::Json, fs::File::open(&path).unwrap()).unwrap();
    let drop: Vec<_> = points.iter().filter(|p| p.backend == "store-drop").collect();
    assert_eq!(drop.len(), 13);
    for p in &drop {
        let e = p.error_metric.unwrap();
        if p.nondet_qubits <= 9 {
            assert!(e.abs() < 1e-12);
        } else {
            let expected = 1.0 - 1000.0 / (1u64 << p.nondet_qubits) as f64;
            assert!((e - expected).abs() < 1e-9);
        }
    }
}

#[test]
fn bench_without_out_exits_2() {
    assert_eq!(run(&["bench", "--suite", "superposition"]).0, 2);
    assert_eq!(run(&["bench", "--suite", "nope", "--out", "x.csv"]).0, 2);
}

#[test]
fn bench_unwritable_out_exits_4() {
    let (code, _, _) = run(&[
        "bench", "--suite", "superposition", "--n-max", "2", "--repeats", "1", "--backends", "array",
        "--out", "/nonexistent/dir/r.csv",
    ]);
    assert_eq!(code, 4);
}

#[test]
fn dense_cap_env_and_flag_precedence() {
    let bin = env!("CARGO_BIN_EXE_qsparse");
    let args = ["run", "--gen", "superposition", "--n", "8", "--r", "2", "--backend", "dense"];
    let status = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = std::process::Command::new(bin);
        cmd.args(args).args(extra).env_remove("QSPARSE_DENSE_CAP");
        if let Some(v) = env {
            cmd.env("QSPARSE_DENSE_CAP", v);
        }
        let out = cmd.output().unwrap();
        (out.status.code().unwrap(), out.stderr.is_empty())
    };
    assert_eq!(status(None, &[]), (0, true));
    assert_eq!(status(Some("6"), &[]).0, 3);
    assert_eq!(status(Some("6"), &["--dense-cap", "8"]), (0, true));
    assert_eq!(status(Some("lots"), &[]).0, 2);
}

#[test]
fn store_dir_env_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_qsparse"))
        .args(["run", "--gen", "addition", "--k", "2", "--r", "4", "--backend", "store"])
        .env("QSPARSE_STORE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0, "store file left behind");
}

#[test]
fn missing_store_dir_exits_4() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_qsparse"))
        .args(["run", "--gen", "superposition", "--n", "3", "--r", "1", "--backend", "store"])
        .env("QSPARSE_STORE_DIR", "/nonexistent/qsparse")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
