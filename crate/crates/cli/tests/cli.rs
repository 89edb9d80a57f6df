use std::process::{Command, Output};

use serde_json::Value;
use toricdiag::export::complex_from_json;
use toricdiag::{CohomologyTable, SplittingType};

fn toricdiag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricdiag"))
        .args(args)
        .env_remove("TORICDIAG_PRIME")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn resolve_hirzebruch_ranks() {
    let o = toricdiag(&["resolve", "--r", "1", "--a", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ranks: Vec<usize> = v["terms"].as_array().unwrap().iter().map(|t| t.as_array().unwrap().len()).collect();
    assert_eq!(ranks, vec![5, 10, 5]);
    for key in ["vars", "degrees"] {
        assert!(v["ring"][key].is_array());
    }
}

#[test]
fn resolve_json_round_trips() {
    let o = toricdiag(&["resolve", "--r", "2", "--a", "1"]);
    let text = stdout(&o);
    let c = complex_from_json(&text).unwrap();
    assert_eq!(c.ranks(), vec![7, 21, 21, 7]);
    assert_eq!(serde_json::to_string_pretty(&c).unwrap() + "\n", text);
}

#[test]
fn output_is_deterministic_and_independent_of_jobs() {
    let a = toricdiag(&["resolve", "--r", "1", "--a", "0,2"]);
    let b = toricdiag(&["resolve", "--r", "1", "--a", "0,2"]);
    assert_eq!(a.stdout, b.stdout);
    let v1 = toricdiag(&["verify", "--r", "1", "--a", "2", "--suite", "exactness", "--jobs", "1"]);
    let v2 = toricdiag(&["verify", "--r", "1", "--a", "2", "--suite", "exactness", "--jobs", "3"]);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn cohomology_table_entry() {
    let o = toricdiag(&["cohomology", "--r", "1", "--a", "2", "--window", "-3:3"]);
    assert_eq!(o.status.code(), Some(0));
    let table: CohomologyTable = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(table.get(0, [1, 1]), Some(6));
    let again = serde_json::to_string_pretty(&table).unwrap() + "\n";
    assert_eq!(again, stdout(&o));
}

#[test]
fn cohomology_text_and_single_degree() {
    let o = toricdiag(&["cohomology", "--r", "1", "--a", "2", "--window", "-1:1,0:2", "--format", "text"]);
    assert!(stdout(&o).starts_with("h^0\n"));
    let o = toricdiag(&["cohomology", "--r", "1", "--a", "2", "--degree", "0,-3", "--format", "text"]);
    assert_eq!(stdout(&o), "h^0 = 0\nh^1 = 0\nh^2 = 4\n");
}

#[test]
fn verify_full_suite_passes() {
    let o = toricdiag(&["verify", "--r", "1", "--a", "3", "--suite", "all"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for suite in ["ranks", "ddzero", "exactness", "monad", "cohomology", "b1"] {
        assert_eq!(v[suite]["pass"], Value::Bool(true), "{suite}");
    }
}

#[test]
fn usage_errors_exit_two_with_rules() {
    let o = toricdiag(&["resolve", "--r", "1", "--a", "3,1"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("--a") && e.contains("0 <= a_1 <= ... <= a_s"), "{e}");
    let o = toricdiag(&["resolve", "--r", "0", "--a", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r >= 1"));
    let o = toricdiag(&["cohomology", "--r", "1", "--a", "1", "--window", "3:-3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--window"));
    let o = toricdiag(&["resolve", "--r", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = toricdiag(&["cohomology", "--r", "1", "--a", "1", "--format", "m2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn prime_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_toricdiag"))
        .args(["verify", "--r", "1", "--a", "1", "--suite", "exactness"])
        .env("TORICDIAG_PRIME", "101")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exactness"]["pass"], Value::Bool(true));
    let o = Command::new(env!("CARGO_BIN_EXE_toricdiag"))
        .args(["resolve", "--r", "1", "--a", "1"])
        .env("TORICDIAG_PRIME", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn monad_outputs() {
    let o = toricdiag(&["monad", "--r", "1", "--a", "1", "--degree", "1,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["provenance"][0][0]["r_label"].is_string());
    let o = toricdiag(&["monad", "--r", "1", "--a", "2", "--degree", "2,-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("non-acyclic"));
    let o = toricdiag(&["monad", "--r", "1", "--a", "0", "--degree", "0,0", "--format", "m2"]);
    assert!(stdout(&o).starts_with("R = ZZ/32003[") || stdout(&o).starts_with("R = QQ["));
}

#[test]
fn virtual_resolution_json() {
    let o = toricdiag(&["virtual", "--r", "1", "--a", "2", "--sheaf", "-1,-1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["shift"][1].as_i64().unwrap() >= 1);
    assert!(v["length"].as_u64().unwrap() <= 2);
    let c = complex_from_json(&v["complex"].to_string()).unwrap();
    assert!(c.check_ddzero().is_ok());
}

#[test]
fn split_verdicts_and_exit_codes() {
    let o = toricdiag(&["split", "--r", "1", "--a", "2", "--sheaf", "1,1;0,1", "--candidate", "1,1;0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rec: SplittingType = serde_json::from_value(v["recovered"].clone()).unwrap();
    assert_eq!(rec, SplittingType::new([([1, 1], 1), ([0, 1], 1)]).unwrap());
    assert_eq!(v["verdict"]["conclusion"], Value::Bool(true));
    let o = toricdiag(&["split", "--r", "1", "--a", "1", "--sheaf", "0,0;1,-1", "--candidate", "0,0;1,-1"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"]["nef_chain_ok"], Value::Bool(false));
}

#[test]
fn warmup_check() {
    let o = toricdiag(&["warmup", "--n", "2", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let c = complex_from_json(&stdout(&o)).unwrap();
    assert_eq!(c.ranks(), vec![3, 6, 3]);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.m2");
    let o = toricdiag(&["resolve", "--r", "1", "--a", "1", "--format", "m2", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let script = std::fs::read_to_string(path).unwrap();
    assert!(script.contains("chainComplex{d1,d2}"));
}
