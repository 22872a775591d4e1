//! Black-box tests of the `tradeforge` binary: JSON shapes, exit codes, and
//! byte-level determinism of the result payload across runs and `--jobs`
//! settings.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tradeforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON document")
}

fn tmp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tradeforge-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const PAPER_T2: &str = r#"{"t":2,"p":1,"q":2,"pairs":[[[1,8],[3,6]],[[2,7],[4,5]]]}"#;

#[test]
fn bounds_reports_exact_rationals() {
    let v = stdout_json(&run(&["bounds", "--t", "4", "--p", "1"]));
    assert_eq!(v["result"]["lower"], "5");
    assert_eq!(v["result"]["upper"], "6");
    let v = stdout_json(&run(&["bounds", "--t", "5", "--p", "2"]));
    assert_eq!(v["result"]["lower"], "135/11");
    assert_eq!(v["result"]["upper"], "22");
    let v = stdout_json(&run(&["bounds", "--t", "5", "--p", "1"]));
    assert_eq!(v["result"]["upper"], Value::Null);
}

#[test]
fn worst_case_on_the_worked_example() {
    let sets = tmp_file("t2.json", PAPER_T2);
    let v = stdout_json(&run(&["adversary", "worst-case", "--sets", sets.to_str().unwrap()]));
    assert_eq!(v["result"]["worst_case"], 4);
    assert_eq!(v["result"]["exact"], true);
    assert_eq!(v["result"]["per_pair"].as_array().unwrap().len(), 2);
    // manifest carries the input digest
    let inputs = v["manifest"]["inputs"].as_object().unwrap();
    assert_eq!(inputs.len(), 1);
    assert!(inputs.values().next().unwrap().as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn constructed_sets_flow_into_the_adversary() {
    let v = stdout_json(&run(&["construct", "p2", "--z", "1"]));
    let sets_json = serde_json::to_string(&v["result"]).unwrap();
    let path = tmp_file("p2z1.json", &sets_json);
    // p defaults to the file's p = 2
    let v = stdout_json(&run(&["adversary", "worst-case", "--sets", path.to_str().unwrap()]));
    assert_eq!(v["result"]["worst_case"], 12);
}

#[test]
fn trade_build_and_verify_round_trip() {
    let sets = tmp_file("t2-trade.json", PAPER_T2);
    let v = stdout_json(&run(&["trade", "build", "--sets", sets.to_str().unwrap()]));
    assert_eq!(v["result"]["first"].as_array().unwrap().len(), 2);
    let trade_json = serde_json::to_string(&v["result"]).unwrap();
    let trade = tmp_file("trade.json", &trade_json);
    let ok = run(&[
        "trade", "verify", "--trade", trade.to_str().unwrap(),
        "--v", "8", "--k", "4", "--t", "1",
    ]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["result"]["result"], "valid");

    // tamper: drop one block from the second side
    let mut parsed: Value = serde_json::from_str(&trade_json).unwrap();
    parsed["second"].as_array_mut().unwrap().pop();
    let broken = tmp_file("broken.json", &serde_json::to_string(&parsed).unwrap());
    let bad = run(&[
        "trade", "verify", "--trade", broken.to_str().unwrap(),
        "--v", "8", "--k", "4", "--t", "1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let body: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(body["result"]["result"], "invalid");
    assert!(body["result"]["violation"].is_object());
}

#[test]
fn trade_build_accepts_an_unpaired_set() {
    let sets = tmp_file("t2-unpaired.json", PAPER_T2);
    let v = stdout_json(&run(&[
        "trade", "build",
        "--sets", sets.to_str().unwrap(),
        "--unpaired", "9,10",
    ]));
    // every block gains the shared elements 9 and 10
    for block in v["result"]["first"].as_array().unwrap() {
        let labels: Vec<u64> = block.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        assert!(labels.contains(&9) && labels.contains(&10));
        assert_eq!(labels.len(), 6);
    }
    let trade_json = serde_json::to_string(&v["result"]).unwrap();
    let trade = tmp_file("trade-unpaired.json", &trade_json);
    let ok = run(&[
        "trade", "verify", "--trade", trade.to_str().unwrap(),
        "--v", "10", "--k", "6", "--t", "1",
    ]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn graphs_analyze_the_illustrated_instance() {
    let sets = tmp_file(
        "fig.json",
        r#"{"t":3,"p":1,"q":2,"pairs":[[[1,12],[6,7]],[[2,5],[3,4]],[[8,11],[9,10]]]}"#,
    );
    let swaps = tmp_file("fig-swaps.json", r#"{"swaps":[[2,3],[8,9],[11,12]]}"#);
    let v = stdout_json(&run(&[
        "graphs", "analyze",
        "--sets", sets.to_str().unwrap(),
        "--p", "1",
        "--swaps", swaps.to_str().unwrap(),
    ]));
    assert_eq!(v["result"]["swap_graph"]["edges"].as_array().unwrap().len(), 3);
    assert_eq!(v["result"]["potential_graph"]["arcs"].as_array().unwrap().len(), 3);
    assert_eq!(v["result"]["swaps_source"], "file");
}

#[test]
fn search_results_are_byte_identical_across_jobs() {
    let a = run(&["search", "optimal", "--t", "3", "--p", "1", "--jobs", "1"]);
    let b = run(&["search", "optimal", "--t", "3", "--p", "1", "--jobs", "3"]);
    let va: Value = serde_json::from_slice(&a.stdout).unwrap();
    let vb: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert_eq!(
        serde_json::to_string(&va["result"]).unwrap(),
        serde_json::to_string(&vb["result"]).unwrap()
    );
    assert_eq!(va["result"]["optimal_count"], 10);
    // identical invocations are byte-identical end to end
    let c = run(&["search", "optimal", "--t", "3", "--p", "1", "--jobs", "1"]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn jobs_env_variable_is_honored() {
    let out = bin()
        .args(["search", "optimal", "--t", "2", "--p", "1"])
        .env("TRADEFORGE_JOBS", "2")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["manifest"]["threads"], 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", "--t", "4"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "p1", "--z", "1"]).status.code(), Some(2));
    let missing = run(&["adversary", "worst-case", "--sets", "/nonexistent.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn inexact_results_exit_one() {
    let sets = tmp_file("t2-budget.json", PAPER_T2);
    let out = run(&[
        "adversary", "worst-case",
        "--sets", sets.to_str().unwrap(),
        "--budget", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["exact"], false);
    assert_eq!(v["manifest"]["exact"], false);
}

#[test]
fn reproduce_emits_a_matching_report() {
    let out_file = tmp_file("bounds-report.json", "");
    let out = run(&[
        "reproduce", "bounds-p1",
        "--out", out_file.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["all_match"], true);
    assert!(v["result"]["rows"].as_array().unwrap().len() >= 6);
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(&out_file).unwrap()).unwrap();
    assert_eq!(written["all_match"], true);
    // provenance labels ride along on every row
    for row in written["rows"].as_array().unwrap() {
        assert!(row["source"].is_string());
    }
}

#[test]
fn text_output_is_human_readable() {
    let out = run(&["--output", "text", "bounds", "--t", "4", "--p", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), "lower=5 upper=6");
}
