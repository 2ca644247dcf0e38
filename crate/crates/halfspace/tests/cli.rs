use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use halfspace::io::save_dataset;
use halfspace_core::bench::gen_halfspace;
use halfspace_core::TrainedModel;

fn halfspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfspace")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn dataset(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let (data, _) = gen_halfspace(n, 3, 0.0, seed).unwrap();
    let path = dir.join(format!("data{seed}.csv"));
    save_dataset(&data, &path).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn help_exits_cleanly() {
    let out = halfspace(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("bench"));
}

#[test]
fn train_is_byte_for_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 200, 1);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let run = halfspace(&["train", "--data", s(&data), "--seed", "5", "--policy", "skip", "--out", s(out)]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        assert!(String::from_utf8_lossy(&run.stdout).contains("accuracy="));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let model: TrainedModel = halfspace::io::read_json(&a).unwrap();
    assert_eq!(model.noise.len(), 200);
}

#[test]
fn train_policy_off_matches_the_logistic_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 150, 2);
    let (off, logistic) = (dir.path().join("off.json"), dir.path().join("logistic.json"));
    let common = ["--data", s(&data), "--lambda", "0", "--alpha", "0", "--optimizer", "sgd"];
    let a = halfspace(&[&["train", "--policy", "off", "--out", s(&off)][..], &common].concat());
    let b = halfspace(&[&["train", "--method", "logistic", "--out", s(&logistic)][..], &common].concat());
    assert_eq!((code(&a), code(&b)), (0, 0));
    let a: TrainedModel = halfspace::io::read_json(&off).unwrap();
    let b: TrainedModel = halfspace::io::read_json(&logistic).unwrap();
    assert_eq!(a.model, b.model);
    assert_eq!(a.convergence, b.convergence);
}

#[test]
fn infeasible_nu_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 12, 3);
    let out = halfspace(&["train", "--data", s(&data), "--nu", "0.05", "--out", s(&dir.path().join("m.json"))]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn input_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = halfspace(&["train", "--data", s(&dir.path().join("nope.csv"))]);
    assert_eq!(code(&missing), 2);
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1.0,NaN,1\n").unwrap();
    let out = halfspace(&["train", "--data", s(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    assert_eq!(code(&halfspace(&["train", "--bogus"])), 1);
    assert_eq!(code(&halfspace(&["train"])), 1);
}

#[test]
fn divergence_exits_numerically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("huge.csv");
    std::fs::write(&path, "1e300,1\n-1e300,-1\n2e300,1\n-2e300,-1\n").unwrap();
    let out = halfspace(&["train", "--data", s(&path), "--policy", "off", "--optimizer", "sgd", "--eta", "1e10"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn detect_writes_both_class_models() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path(), 120, 4);
    let path = dir.path().join("det.json");
    let out = halfspace(&["detect", "--data", s(&data), "--nu", "0.2", "--gamma", "0.5", "--out", s(&path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for class in ["positive", "negative"] {
        for key in ["alphas", "support", "offset", "gamma", "nu"] {
            assert!(json[class].get(key).is_some(), "{class}.{key}");
        }
        assert_eq!(json[class]["gamma"], 0.5);
    }
}

#[test]
fn bench_writes_one_row_per_rate() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("results");
    let rates = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    let out = halfspace(&["bench", "--rates", rates, "--seeds", "10", "--n", "200", "--d", "3", "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["accuracy.csv", "sensitivity.csv", "convergence.csv"] {
        let table = rows(&out_dir.join(name));
        assert_eq!(table.len(), 9, "{name}");
        assert_eq!(table[0][0], "0.100000");
    }
    let accuracy = rows(&out_dir.join("accuracy.csv"));
    for row in &accuracy {
        for v in &row[1..5] {
            let v: f64 = v.parse().unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
    }
    assert_eq!(rows(&out_dir.join("cells.csv")).len(), 10 * 10 * 4);

    // `report` re-renders the same markdown from the CSVs.
    let before = std::fs::read_to_string(out_dir.join("report.md")).unwrap();
    let again = halfspace(&["report", "--out", s(&out_dir)]);
    assert_eq!(code(&again), 0);
    assert_eq!(String::from_utf8_lossy(&again.stdout), before);
    assert!(before.contains("| Noise rate | Proposed | SVM | Logistic Regression | Decision Tree |"));
}

#[test]
fn clean_bench_learns_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("clean");
    let out = halfspace(&["bench", "--rates", "0.0", "--seeds", "5", "--d", "2", "--out", s(&out_dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = rows(&out_dir.join("accuracy.csv"));
    assert_eq!(table.len(), 1);
    for v in &table[0][1..5] {
        assert!(v.parse::<f64>().unwrap() >= 0.95, "{:?}", table[0]);
    }
}

#[test]
fn bench_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = halfspace(&["bench", "--methods", "", "--out", s(&dir.path().join("x"))]);
    assert_eq!(code(&empty), 1);
    assert!(String::from_utf8_lossy(&empty.stderr).contains("methods"));
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[experiment]\nmethods = []\n").unwrap();
    let from_file = halfspace(&["bench", "--config", s(&cfg), "--out", s(&dir.path().join("y"))]);
    assert_eq!(code(&from_file), 1);
    assert!(String::from_utf8_lossy(&from_file.stderr).contains("methods"));
    for rates in ["0.3,0.1", "1.0", "0.1,0.1"] {
        assert_eq!(code(&halfspace(&["bench", "--rates", rates])), 1, "{rates}");
    }
    assert_eq!(code(&halfspace(&["bench", "--seeds", "0"])), 1);
}

#[test]
fn unwritable_output_exits_with_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    std::fs::write(&file, "x").unwrap();
    let out = halfspace(&["bench", "--rates", "0.1", "--seeds", "1", "--n", "100", "--out", s(&file.join("sub"))]);
    assert_eq!(code(&out), 2);
}
