use std::process::{Command, Output};

use serde_json::Value;

fn twarrow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twarrow")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn certify_com_at_zero_is_trivial() {
    let out = twarrow(&["tw", "certify-com", "--max-arity", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["kind"], "tw_com_certificate");
    assert_eq!(doc["data"]["homs"].as_array().unwrap().len(), 1);
}

#[test]
fn quillen_cohomology_of_com_with_constant_coefficients_vanishes() {
    let out = twarrow(&["qcohom", "--operad", "com", "--coeff", "const:1", "--degrees", "0..4", "--max-arity", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let degrees = doc["data"]["degrees"].as_array().unwrap();
    assert_eq!(degrees.len(), 5);
    assert!(degrees.iter().all(|d| d[1] == 0));
    for key in ["field", "truncation", "backend", "seed"] {
        assert!(doc["meta"].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn certify_ass_counts_monotone_maps() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("homs.csv");
    let out = twarrow(&["tw", "certify-ass", "--max-arity", "4", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<Vec<usize>> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('m'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 25);
    let choose = |n: usize, k: usize| (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1));
    for r in rows {
        assert_eq!(r[2], choose(r[0] + r[1] + 1, r[0] + 1));
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(twarrow(&["bogus"]).status.code(), Some(2));
    assert_eq!(twarrow(&["tw", "certify-com"]).status.code(), Some(2));
    assert_eq!(twarrow(&["ext", "--base", "gamma:2", "--source", "t", "--target", "nope", "--degrees", "0..1"]).status.code(), Some(2));
}

#[test]
fn help_exits_zero() {
    assert_eq!(twarrow(&["--help"]).status.code(), Some(0));
}

#[test]
fn tw_build_feeds_ext() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tw.json");
    let file = file.to_str().unwrap();
    assert_eq!(twarrow(&["tw", "build", "--operad", "com", "--max-arity", "2", "--out", file]).status.code(), Some(0));
    let out = twarrow(&["ext", "--base", file, "--source", "rep:0", "--target", "const:1", "--degrees", "0..2", "--field", "q"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["data"]["degrees"], serde_json::json!([[0, 1], [1, 0], [2, 0]]));
}

#[test]
fn seeded_runs_are_byte_identical_across_thread_counts() {
    let args = ["ext", "--base", "gamma:3", "--source", "t", "--target", "random:2,2", "--degrees", "0..2", "--seed", "5"];
    let one = twarrow(&[&["--threads", "1"], &args[..]].concat());
    let four = twarrow(&[&["--threads", "4"], &args[..]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(json(&one)["meta"]["seed"], "5");
}

#[test]
fn les_check_passes() {
    let out = twarrow(&["ass", "les-check", "--trunc", "2", "--top-degree", "2", "--trials", "2", "--seed", "3", "--field", "fp:101"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["data"]["failed_trials"], 0);
}

#[test]
fn operad_check_and_sset_builtins() {
    assert_eq!(twarrow(&["operad", "check", "--spec", "ass", "--max-arity", "3"]).status.code(), Some(0));
    let out = twarrow(&["sset", "un", "--variance", "right", "--input", "std:1", "--dim", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["kind"], "un_report");
}
