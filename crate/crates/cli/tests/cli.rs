use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stream-maxcov"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

const TOY_A: &str = "1 1 2 3 4\n2 5 6 7 8\n3 1 2 5 6\n4 3 4 7 8\n";

fn field(stdout: &[u8], key: &str) -> String {
    let text = String::from_utf8_lossy(stdout);
    let line = text.lines().find(|l| l.split_whitespace().next() == Some(key)).unwrap();
    line[20..].to_string()
}

#[test]
fn toy_a_with_oracle_guess_is_optimal() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "toy.sets", TOY_A);
    let out = run(&["run", s(&data), "--algo", "single-pass", "--k", "2", "--oracle-z"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(field(&out.stdout, "ratio"), "1");
    assert_eq!(field(&out.stdout, "opt"), "8");
    assert_eq!(field(&out.stdout, "passes"), "1");
}

#[test]
fn gen_is_deterministic_and_shaped() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (dir.path().join("a.sets"), dir.path().join("b.sets"), dir.path().join("c.sets"));
    for (out, seed) in [(&a, "1"), (&b, "1"), (&c, "2")] {
        let o = run(&["gen", "planted-cover", "--out", s(out), "--n", "1000", "--m", "100", "--k", "5", "--seed", seed]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());

    let graph = dir.path().join("g.gstream");
    assert!(run(&["gen", "regular-graph", "--out", s(&graph), "--nodes", "100", "--degree", "3"]).status.success());
    let text = fs::read_to_string(&graph).unwrap();
    let inserts = text.lines().filter(|l| l.starts_with('+')).count();
    assert_eq!(inserts, 150);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "toy.sets", TOY_A);
    let bad = write(&dir, "bad.sets", "1 1 2\n1 3\n");
    let graph = dir.path().join("g.gstream");
    assert!(run(&["gen", "regular-graph", "--out", s(&graph), "--nodes", "10", "--degree", "3"]).status.success());

    assert_eq!(run(&["run", s(&data), "--algo", "vertex-sample"]).status.code(), Some(2));
    assert_eq!(run(&["run", s(&graph), "--algo", "single-pass"]).status.code(), Some(2));
    assert_eq!(run(&["run", s(&data), "--algo", "half", "--eps", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["run", s(&data), "--algo", "nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "regular-graph", "--out", s(&graph), "--nodes", "5", "--degree", "3"]).status.code(), Some(2));
    assert_eq!(run(&["run", s(&bad), "--algo", "greedy"]).status.code(), Some(3));

    let capped = bin()
        .args(["run", s(&data), "--algo", "greedy", "--k", "2", "--require-oracle"])
        .env("STREAM_MAXCOV_ORACLE_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(4));
    let skipped = bin()
        .args(["run", s(&data), "--algo", "greedy", "--k", "2"])
        .env("STREAM_MAXCOV_ORACLE_CAP", "3")
        .output()
        .unwrap();
    assert!(skipped.status.success());
    assert_eq!(field(&skipped.stdout, "ratio"), "-");
    assert!(String::from_utf8_lossy(&skipped.stderr).contains("oracle skipped"));
}

#[test]
fn compare_writes_one_row_per_algorithm() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("r.sets");
    assert!(run(&["gen", "random-sets", "--out", s(&data), "--n", "50", "--m", "15", "--max-size", "10"]).status.success());
    let csv = dir.path().join("out.csv");
    let out = run(&["compare", s(&data), "--algos", "single-pass,multi-pass,half", "--k", "3", "--oracle-z", "--csv", s(&csv)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    let ratio = header.iter().position(|h| h == "ratio").unwrap();
    let algorithm = header.iter().position(|h| h == "algorithm").unwrap();
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let r: f64 = row[ratio].parse().unwrap();
        let floor = match &row[algorithm] {
            "single-pass" => 1.0 - (-1f64).exp(),
            "multi-pass" => 1.0 - (-1f64).exp() - 0.3,
            _ => 0.35,
        };
        assert!(r >= floor, "{row:?}");
    }
}

#[test]
fn empty_dataset_covers_nothing() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "empty.sets", "");
    let out = run(&["compare", s(&data), "--algos", "single-pass,half,greedy,sketch-all", "--k", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let coverages: Vec<&str> = text.lines().filter(|l| l.starts_with("exact_coverage")).collect();
    assert_eq!(coverages.len(), 4);
    assert!(coverages.iter().all(|l| l.ends_with(" 0")));
}

#[test]
fn sketch_all_reports_both_coverages() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("r.sets");
    assert!(run(&["gen", "random-sets", "--out", s(&data), "--n", "60", "--m", "20", "--max-size", "12"]).status.success());
    let out = run(&["run", s(&data), "--algo", "sketch-all", "--k", "3"]);
    assert!(out.status.success());
    assert_ne!(field(&out.stdout, "estimated_coverage"), "-");
    assert_ne!(field(&out.stdout, "exact_coverage"), "-");
}
