use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn fockent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fockent")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = fockent(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().expect("number") - want).abs() < 1e-9
}

#[test]
fn analyze_two_split_singles() {
    let doc = json(&["analyze", "(|0,1>+|1,0>)^2", "--stats", "boson"]);
    assert_eq!(doc["schema_version"], "1");
    assert_eq!(doc["command"], "analyze");
    assert_eq!(doc["input"]["state"], "(|0,1>+|1,0>)^2");
    let r = &doc["results"];
    assert!(close(&r["e_m"], 2.0));
    assert!(close(&r["s_single"], 1.0));
    assert!(close(&r["e_p"], 0.5));
    assert!(r["qc_fermion"].is_null());

    let out = fockent(&["analyze", "(|0,1>+|1,0>)^2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("E_P         1/2"), "{text}");
    assert!(text.contains("QC          \u{2212}"), "{text}");
}

#[test]
fn analyze_fermion_pair() {
    let r = &json(&["analyze", "|1,1>", "--stats", "fermion"])["results"];
    assert!(close(&r["e_m"], 0.0));
    assert!(close(&r["s_single"], 1.0));
    assert!(close(&r["qc_fermion"], 0.0));
    assert!(close(&r["e_p"], 0.0));
}

#[test]
fn malformed_ket_exits_with_parse_error() {
    let out = fockent(&["analyze", "|2,>"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("offset 3"), "{err}");
}

#[test]
fn invalid_fermion_state_exits_with_domain_error() {
    let out = fockent(&["analyze", "|0,2>+|2,0>", "--stats", "fermion"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn table_passes_and_skips_inapplicable_rows() {
    let out = fockent(&["table1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&["table1"]);
    let rows = doc["results"].as_array().unwrap();
    assert_eq!(rows.len(), 14);
    assert!(rows.iter().all(|r| r["passed"] == true));
    let skipped = rows
        .iter()
        .find(|r| r["check"]["state"] == "|0,2>+|2,0>" && r["check"]["stats"] == "fermion")
        .unwrap();
    assert!(skipped["check"]["report"].is_null());
    assert!(skipped["check"]["skipped_reason"].is_string());
}

#[test]
fn tampered_table_exits_with_mismatch() {
    let doc = json(&["table1"]);
    let mut expected: Vec<Value> = doc["results"]
        .as_array()
        .unwrap()
        .iter()
        .step_by(2)
        .map(|r| r["expected"].clone())
        .collect();
    expected[2]["e_p"] = Value::from(0.25);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("expected.json");
    fs::write(&path, serde_json::to_string(&expected).unwrap()).unwrap();

    let out = fockent(&["table1", "--expected", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL E_P"), "{text}");

    fs::write(&path, "not json").unwrap();
    assert_eq!(fockent(&["table1", "--expected", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn scan_small_grids() {
    let rows = json(&["scan", "--max-n", "2"])["results"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["count"], 1);
    assert!(close(&rows[0]["exact"], 0.0));
    assert_eq!(rows[1]["count"], 2);
    assert!(close(&rows[1]["exact"], 0.5));

    let rows = json(&["scan", "--max-n", "1"])["results"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 1);
    assert!(close(&rows[0]["exact"], 0.0));

    assert_eq!(fockent(&["scan", "--max-n", "0"]).status.code(), Some(2));
}

#[test]
fn scan_reaches_asymptote() {
    let doc = json(&["scan", "--max-n", "256"]);
    let last = doc["results"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["count"], 256);
    assert!(last["difference"].as_f64().unwrap().abs() < 0.02);
}

#[test]
fn superadd_examples() {
    let single = "|0,1>+|1,0>";
    let r = &json(&["superadd", single, single])["results"];
    assert!(close(&r["lhs"], 0.5));
    assert!(close(&r["rhs"], 0.0));
    assert_eq!(r["equality_predicted"], false);

    let r = &json(&["superadd", "|1,1>", single])["results"];
    assert!(close(&r["gap"], 0.0));
    assert_eq!(r["equality_predicted"], true);

    let double = "(|0,1>+|1,0>)^2";
    let r = &json(&["superadd", double, double])["results"];
    assert!((r["lhs"].as_f64().unwrap() - 1.969_360_937_77).abs() < 1e-9);

    assert_eq!(fockent(&["superadd", "|1,1>", "|1>"]).status.code(), Some(2));
}

#[test]
fn random_superadd_records_seed() {
    let doc = json(&["superadd", "--random", "5", "--seed", "11"]);
    assert_eq!(doc["seed"], 11);
    let pairs = doc["results"].as_array().unwrap();
    assert_eq!(pairs.len(), 5);
    assert!(pairs.iter().all(|p| p["report"]["gap"].as_f64().unwrap() >= -1e-9));
}

#[test]
fn json_output_is_byte_identical() {
    for args in [
        vec!["analyze", "|0,2>+sqrt(2)|1,1>+|2,0>", "--json"],
        vec!["table1", "--json"],
        vec!["scan", "--max-n", "64", "--json"],
        vec!["superadd", "--random", "4", "--seed", "3", "--stats", "fermion", "--json"],
    ] {
        let a = fockent(&args).stdout;
        let b = fockent(&args).stdout;
        assert_eq!(a, b, "{args:?}");
        let v: Value = serde_json::from_slice(&a).unwrap();
        assert_eq!(serde_json::from_str::<Value>(&v.to_string()).unwrap(), v);
    }
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = fockent(&["scan", "--max-n", "4", "--json", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"].as_array().unwrap().len(), 3);
}
