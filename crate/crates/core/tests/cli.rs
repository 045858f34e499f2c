use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerwedge"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn classify_envelope() {
    let v = json(&["classify", "D", "4"]);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["timestamp"], 1_700_000_000u64);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["payload"]["euler"], serde_json::json!([1, 3, 4]));
    assert_eq!(v["payload"]["symmetric"], serde_json::json!([1, 3, 4]));
    let f4 = json(&["classify", "F4", "4"]);
    assert_eq!(f4["payload"]["euler"], serde_json::json!([]));
    let all = json(&["classify", "--all"]);
    assert_eq!(all["payload"].as_array().unwrap().len(), 40);
}

#[test]
fn json_round_trips() {
    for args in [
        &["grading", "sl", "4", "h2"][..],
        &["orbits", "3"],
        &["bgl-demo", "mobius", "4", "--samples", "4"],
    ] {
        let v = json(args);
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
    }
    assert_eq!(json(&["grading", "so", "3", "3", "h1"])["payload"]["dims"]["dim_plus"], 4);
    assert_eq!(json(&["orbits", "2"])["payload"]["orbits"], 2);
    assert_eq!(json(&["orbits"])["payload"]["orbits"], 2);
}

#[test]
fn seeded_runs_are_deterministic() {
    let args = ["--seed", "7", "bgl-demo", "affine", "4", "--samples", "5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let other = run(&["--seed", "8", "bgl-demo", "affine", "4", "--samples", "5"]);
    assert_ne!(run(&args).stdout, other.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["classify", "Q", "2"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "D", "3"]).status.code(), Some(2));
    assert_eq!(run(&["bgl-demo", "nope", "2"]).status.code(), Some(2));
    assert_eq!(run(&["grading", "sl", "x", "h1"]).status.code(), Some(2));
    let bad = run(&["bgl-demo", "mobius", "4", "--perturb", "--samples", "4"]);
    assert_eq!(bad.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(v["payload"]["report"]["hk2"]["status"], "fail");
    let triv = json(&["bgl-demo", "trivial", "2"]);
    assert_eq!(triv["payload"]["degenerate"], true);
}

#[test]
fn table_output() {
    let out = run(&["--table", "classify", "E7", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("family"));
    assert!(text.lines().nth(1).unwrap().starts_with("E7"));
}
