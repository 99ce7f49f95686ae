use std::path::PathBuf;
use std::process::{Command, Output};

use gvturan_cli::run_args;
use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn tgv(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tgv"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["tgv"];
    full.extend_from_slice(args);
    let out = run_args(full).unwrap();
    assert_eq!(out.status, 0, "{}", out.output);
    serde_json::from_str(&out.output).unwrap()
}

fn text(args: &[&str]) -> String {
    let mut full = vec!["tgv"];
    full.extend_from_slice(args);
    run_args(full).unwrap().output
}

const SEVEN: &str = "2 3\n001\n010\n011\n100\n101\n110\n111\n";

#[test]
fn enum_reports_exact_coefficients() {
    let dir = TempDir::new().unwrap();
    let seven = write(&dir, "seven.txt", SEVEN);
    let full = write(&dir, "full.txt", "2 2\n00\n01\n10\n11\n");
    let single = write(&dir, "one.txt", "# lone word\n3 2\n12\n");
    assert_eq!(json(&["enum", seven.to_str().unwrap()])["B"], serde_json::json!(["1", "18/7", "18/7", "6/7"]));
    assert_eq!(json(&["enum", full.to_str().unwrap()])["B"], serde_json::json!(["1", "2", "1"]));
    let one = json(&["enum", "--local", single.to_str().unwrap()]);
    assert_eq!(one["B"], serde_json::json!(["1"]));
    assert_eq!(one["local"][0]["center"], "12");
    let csv = text(&["--format", "csv", "enum", seven.to_str().unwrap()]);
    assert!(csv.starts_with("j,B_j\n0,1\n1,18/7\n"));
}

#[test]
fn bound_rows_and_skips() {
    let dir = TempDir::new().unwrap();
    let full = write(&dir, "full.txt", "2 1\n0\n1\n");
    let rep = write(&dir, "rep.txt", "2 2\n00\n11\n");
    let csv = text(&["bound", full.to_str().unwrap(), "--delta-grid", "0.1,0.5", "--method", "main"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "delta,method,x_star,bound,gv,excess,status");
    let cols: Vec<&str> = lines[1].split(',').collect();
    let bound: f64 = cols[3].parse().unwrap();
    assert!((bound - 0.5310044).abs() < 1e-6);
    assert!(cols[5].parse::<f64>().unwrap().abs() < 1e-9);
    assert_eq!(lines[2], "0.5,main,,,,,skipped");

    let csv = text(&["bound", rep.to_str().unwrap(), "--delta-grid", "0.05:0.45:9"]);
    for line in csv.lines().skip(1).filter(|l| l.contains(",main,")) {
        let excess: f64 = line.split(',').nth(5).unwrap().parse().unwrap();
        assert!(excess <= 1e-9);
    }
}

#[test]
fn transform_agrees() {
    let dir = TempDir::new().unwrap();
    let rep = write(&dir, "rep.txt", "2 2\n00\n11\n");
    let full = write(&dir, "full.txt", "2 2\n00\n01\n10\n11\n");
    let r = json(&["transform", rep.to_str().unwrap()]);
    assert_eq!(r["substitution"], serde_json::json!(["1", "0", "1"]));
    assert_eq!(r["agree"], true);
    assert_eq!(r["nonnegative"], true);
    let f = json(&["transform", full.to_str().unwrap()]);
    assert_eq!(f["krawtchouk"], serde_json::json!(["1", "0", "0"]));
}

#[test]
fn check_summaries() {
    let dir = TempDir::new().unwrap();
    let seven = write(&dir, "seven.txt", SEVEN);
    let full = write(&dir, "full.txt", "2 2\n00\n01\n10\n11\n");
    let csv = text(&["check", seven.to_str().unwrap(), "--kind", "lemma8"]);
    assert!(csv.starts_with("z,lhs\n1/257,"));
    let summary = csv.lines().last().unwrap();
    assert!(summary.contains("improves=false"));
    assert!(summary.contains("monotone_decreasing=true"));

    let r = json(&["--format", "json", "check", seven.to_str().unwrap(), "--kind", "lemma4", "--grid", "32"]);
    assert_eq!(r["improves"], false);
    for kind in ["lemma4", "lemma8"] {
        let r = json(&["--format", "json", "check", full.to_str().unwrap(), "--kind", kind, "--grid", "16"]);
        assert!(r["points"].as_array().unwrap().iter().all(|p| p["lhs"] == 1.0));
    }
}

#[test]
fn search_examples_and_resume() {
    let r = json(&["search", "--q", "2", "--m", "2"]);
    assert_eq!(r["violation_found"], false);

    let dir = TempDir::new().unwrap();
    let journal = dir.path().join("j.tsv");
    let args = [
        "search", "--q", "2", "--m", "3", "--strategy", "random", "--budget", "200", "--seed", "7",
        "--grid", "64", "--resume", journal.to_str().unwrap(),
    ];
    let first = text(&args);
    let lines = std::fs::read_to_string(&journal).unwrap();
    assert_eq!(lines.lines().count(), 200);
    assert!(lines.lines().all(|l| l.split('\t').count() == 3));
    let resumed = text(&args);
    assert_eq!(first, resumed);
    let r: Value = serde_json::from_str(&first).unwrap();
    assert!(r["best_sup"].as_f64().unwrap() <= 1.0);
}

#[test]
fn verify_examples() {
    let dir = TempDir::new().unwrap();
    let rep = write(&dir, "rep.txt", "2 2\n00\n11\n");
    let bit = write(&dir, "bit.txt", "2 1\n0\n1\n");
    let r = json(&["verify", rep.to_str().unwrap(), "--n", "2", "--delta", "0.75"]);
    assert_eq!(r["d"], 3);
    assert_eq!(r["sandwich"], "PASS");
    assert_eq!(r["clique_size"], 2);
    assert_eq!(r["edge_identity"], true);
    let r = json(&["verify", bit.to_str().unwrap(), "--n", "3", "--d", "1"]);
    assert_eq!(r["clique_size"], 8);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.txt", "2 3\n001\n0a1\n");
    let out = tgv(&["enum", bad.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let out = tgv(&["enum", "/nonexistent/code.txt"], &[]);
    assert_eq!(out.status.code(), Some(1));

    let out = tgv(&["search", "--q", "3", "--m", "3"], &[]);
    assert_eq!(out.status.code(), Some(2));

    let big = write(&dir, "big.txt", "2 4\n0000\n0001\n0010\n0011\n0100\n0101\n0110\n0111\n1000\n");
    let out = tgv(&["verify", big.to_str().unwrap(), "--n", "4", "--d", "3"], &[]);
    assert_eq!(out.status.code(), Some(2));

    let good = write(&dir, "good.txt", SEVEN);
    let out = tgv(&["transform", good.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn flags_beat_environment_beats_defaults() {
    let dir = TempDir::new().unwrap();
    let seven = write(&dir, "seven.txt", SEVEN);
    let path = seven.to_str().unwrap();
    let rows = |out: Output| String::from_utf8(out.stdout).unwrap().lines().count();
    // header + grid points + summary
    assert_eq!(rows(tgv(&["check", path], &[])), 258);
    assert_eq!(rows(tgv(&["check", path], &[("TGV_GRID", "20")])), 22);
    assert_eq!(rows(tgv(&["check", path, "--grid", "30"], &[("TGV_GRID", "20")])), 32);
    let out = tgv(&["transform", path], &[("TGV_FORMAT", "csv")]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("i,substitution,krawtchouk\n"));
}

#[test]
fn output_is_deterministic_across_threads() {
    let dir = TempDir::new().unwrap();
    let seven = write(&dir, "seven.txt", SEVEN);
    let path = seven.to_str().unwrap();
    for args in [
        vec!["check", path, "--grid", "64"],
        vec!["verify", path, "--n", "2", "--d", "3"],
        vec!["bound", path],
    ] {
        let base = tgv(&args, &[]).stdout;
        for t in ["1", "4"] {
            let mut with = vec!["--threads", t];
            with.extend(&args);
            assert_eq!(tgv(&with, &[]).stdout, base);
        }
    }
}
