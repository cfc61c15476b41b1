use std::process::Command;

use multistab::cli::{run, Output, EXIT_BUDGET, EXIT_INTEGRITY, EXIT_USAGE};
use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    run(std::iter::once("multistab").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = cli(&all);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 1, "one document per invocation");
    serde_json::from_str(&out.stdout).unwrap()
}

#[test]
fn count_and_bijection() {
    assert_eq!(cli(&["count", "1-2", "321432212"]).stdout, "9\n");
    assert_eq!(
        cli(&["bijection", "theta", "1", "321432212"]).stdout,
        "321431112\n"
    );
    let out = cli(&["bijection", "psi", "1", "321432212", "--check", "1-2"]);
    assert_eq!(out.stdout, "312431121\n1-2 9 9\n");
    let v = json(&["bijection", "phi", "1", "1132", "--check", "1-2"]);
    assert_eq!(v["output"], "2231");
    assert_eq!(v["check"]["before"], "4");
    assert_eq!(v["check"]["after"], "2");
    assert_eq!(v["check"]["preserved"], false);
}

#[test]
fn witness_for_3142() {
    let out = cli(&["witness", "3142"]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["multiset"], serde_json::json!([1, 1, 2, 1, 1]));
    assert_eq!(v["rearranged"], serde_json::json!([1, 1, 1, 1, 2]));
    assert_eq!(v["s"], 2);
    assert_eq!(v["rearranged_count"], "0");
    assert_ne!(v["count"], "0");
}

#[test]
fn witness_for_monotone_pattern_is_null() {
    let out = cli(&["witness", "123"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "null\n");
}

#[test]
fn dist_stability_and_extend() {
    assert_eq!(cli(&["dist", "12", "(2,1)"]).stdout, "0 1\n1 2\n");
    let v = json(&["dist", "12", "2,1"]);
    assert_eq!(v["counts"]["1"], "2");
    assert!(cli(&["stability", "12", "(2,1,1)"])
        .stdout
        .starts_with("stable-on-orbit"));
    let v = json(&["stability", "1-2-3", "(2,1,3)"]);
    assert_eq!(v["verdict"], "unstable");
    let out = cli(&["extend", "21435"]);
    assert!(out.stdout.contains("index 3\n"), "{}", out.stdout);
    assert!(out.stdout.contains("extended-permutation 2143657\n"));
}

#[test]
fn scan_csv_and_json() {
    let out = cli(&[
        "scan",
        "--family",
        "list:132;123",
        "--max-size",
        "5",
        "--max-letters",
        "4",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(
        lines[0],
        "pattern,verdict,witness_multiset,s,count_a,count_b"
    );
    assert!(lines.iter().any(|l| l.starts_with("132,unstable,")));
    assert!(lines.contains(&"123,no-counterexample,,,,"));
    let v = json(&[
        "scan",
        "--family",
        "consecutive:3",
        "--max-size",
        "5",
        "--max-letters",
        "3",
    ]);
    assert_eq!(v["entries"].as_array().unwrap().len(), 6);
}

#[test]
fn eulerian_and_generating_functions() {
    let out = cli(&["eulerian", "--max-m", "4"]);
    assert!(out.stdout.starts_with("m,k,s,value\n"));
    assert!(out.stdout.contains("4,0,1,11\n"));
    let v = json(&["eulerian", "--max-m", "3"]);
    assert_eq!(v["m_max"], 3);
    assert!(cli(&["verify-gf", "12", "(1,1,1)", "1"])
        .stdout
        .starts_with("pass"));
    let v = json(&["verify-gf", "21", "(2,2)", "1"]);
    assert_eq!(v["holds"], true);
    assert!(
        cli(&["verify-pde", "--xdeg", "3", "--ydeg", "1", "--zdeg", "3"])
            .stdout
            .starts_with("pass")
    );
    let v = json(&["verify-pde", "--xdeg", "0", "--ydeg", "0", "--zdeg", "0"]);
    assert_eq!(v["holds"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cli(&["count", "1-0", "12"]).code, EXIT_USAGE);
    assert_eq!(cli(&["bijection", "theta", "3", "121"]).code, EXIT_USAGE);
    let out = cli(&["dist", "12", "(4,4,4)", "--budget", "100"]);
    assert_eq!(out.code, EXIT_BUDGET);
    assert!(out.stderr.contains("budget"));
    assert!(out.stdout.is_empty());
    assert_eq!(cli(&["cache", "stats"]).code, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn corrupt_cache_is_an_integrity_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    std::fs::write(&path, "{not json\n").unwrap();
    let out = cli(&["dist", "12", "(2,1)", "--cache", path.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_INTEGRITY);
}

#[test]
fn thread_count_does_not_change_output() {
    for args in [
        vec!["dist", "1-32", "(2,2,2,1)"],
        vec![
            "scan",
            "--family",
            "consecutive:3",
            "--max-size",
            "6",
            "--max-letters",
            "3",
        ],
    ] {
        let one = cli(&[args.clone(), vec!["--threads", "1", "--json"]].concat());
        let many = cli(&[args.clone(), vec!["--threads", "8", "--json"]].concat());
        assert_eq!(one, many);
    }
}

#[test]
fn binary_runs() {
    let out = Command::new(env!("CARGO_BIN_EXE_multistab"))
        .args(["count", "1-2-3", "211342"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "3\n");
    let out = Command::new(env!("CARGO_BIN_EXE_multistab"))
        .args(["count"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
}
