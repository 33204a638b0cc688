use std::process::{Command, Output};

use serde_json::Value;

fn pellrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pellrank"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = pellrank(args);
    let v = serde_json::from_slice(&out.stdout).expect("stdout is one JSON object");
    (v, out.status.code().unwrap())
}

#[test]
fn solve_prints_small_witness() {
    let out = pellrank(&["solve", "--d", "33", "--l", "3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"status":"soluble","witness":[5,2]}"#
    );
    let (v, code) = json(&["solve", "--d", "14", "--l", "-7", "--json"]);
    assert_eq!((v["witness"].clone(), code), (serde_json::json!([7, 2]), 0));
}

#[test]
fn decisions_exit_one() {
    let (v, code) = json(&["solve", "--d", "3", "--l", "3", "--json"]);
    assert_eq!(code, 1);
    assert_eq!(v["status"], "q_insoluble");
    assert_eq!(v["reason"], "fails_ed2");
    let out = pellrank(&["solve", "--d", "3", "--l", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("q_insoluble") && text.contains("fails_ed2"));
    let (v, code) = json(&["negpell", "--d", "34", "--json"]);
    assert_eq!((v["soluble"].as_bool(), code), (Some(false), 1));
    let (v, code) = json(&["negpell", "--d", "13", "--json"]);
    assert_eq!((v["witness"].clone(), code), (serde_json::json!([18, 5]), 0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(pellrank(&["solve", "--d", "33"]).status.code(), Some(2));
    assert_eq!(pellrank(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pellrank(&["solve", "--d", "33", "--l", "3", "--bogus"]).status.code(), Some(2));
    let (v, code) = json(&["solve", "--d", "12", "--l", "3", "--json"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("squarefree"));
    let (_, code) = json(&["solve", "--d", "33", "--l", "5", "--json"]);
    assert_eq!(code, 2);
    let (_, code) = json(&["constants", "--tol", "0", "--json"]);
    assert_eq!(code, 2);
    let (v, code) = json(&["redei-symbol", "--a", "5", "--b", "13", "--c", "29", "--json"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("admissible"));
}

#[test]
fn constants_table() {
    let (v, code) = json(&["constants", "--json"]);
    assert_eq!(code, 0);
    assert!((v["alpha"].as_f64().unwrap() - 0.4194).abs() < 5e-5);
    assert!((v["pell_lower"].as_f64().unwrap() - 0.54302).abs() < 5e-6);
    assert!((v["pell_upper"].as_f64().unwrap() - 0.59944).abs() < 5e-6);
    assert!(v["table"].as_array().unwrap().len() >= 7);
}

#[test]
fn json_round_trips() {
    for args in [
        &["classgroup", "--delta", "136", "--json"][..],
        &["redei-matrix", "--d", "105", "--json"],
        &["constants", "--json"],
        &["solve", "--d", "33", "--l", "3", "--json"],
    ] {
        let out = pellrank(args);
        let text = String::from_utf8(out.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v.to_string(), text.trim(), "{args:?}");
        // stable across runs
        assert_eq!(pellrank(args).stdout, text.as_bytes());
    }
}

#[test]
fn class_group_and_redei() {
    let (v, _) = json(&["classgroup", "--delta", "136", "--json"]);
    assert_eq!(v["h_plus"], 4);
    assert_eq!(v["rk4plus"], 1);
    assert_eq!(v["negative_pell"], false);
    let (v, _) = json(&["redei-matrix", "--d", "34", "--json"]);
    assert_eq!(v["rk4"], 1);
    assert_eq!(v["matrix"], serde_json::json!([[0, 0], [0, 0]]));
}

#[test]
fn human_mode_carries_the_same_fields() {
    let (v, _) = json(&["redei-matrix", "--d", "105", "--json"]);
    let text = String::from_utf8(pellrank(&["redei-matrix", "--d", "105"]).stdout).unwrap();
    for key in v.as_object().unwrap().keys() {
        assert!(text.contains(&format!("{key}:")), "{key} missing");
    }
}

#[test]
fn scan_writes_records_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.jsonl");
    let out_s = out.to_str().unwrap();
    let (v, code) = json(&["scan", "--n", "3000", "--l", "3", "--out", out_s, "--json"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let count_q = v["summary"]["count_q"].as_u64().unwrap();
    assert_eq!(lines.len() as u64, count_q + 1);
    let trailer: Value = serde_json::from_str(lines.last().unwrap()).unwrap();
    assert_eq!(trailer["summary_sha256"], v["summary_sha256"]);
    let side: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.jsonl.summary.json")).unwrap())
            .unwrap();
    assert_eq!(side, trailer);
    assert!(!dir.path().join("s.jsonl.ckpt").exists());

    let out2 = dir.path().join("t.jsonl");
    let (v2, _) = json(&[
        "scan", "--n", "3000", "--l", "3", "--out", out2.to_str().unwrap(), "--workers", "4", "--json",
    ]);
    assert_eq!(v2["summary_sha256"], v["summary_sha256"]);
    assert_eq!(std::fs::read(&out2).unwrap(), text.as_bytes());
}

#[test]
fn scan_rejects_unwritable_output() {
    let (_, code) = json(&["scan", "--n", "100", "--l", "3", "--out", "/nonexistent/dir/x.jsonl", "--json"]);
    assert_eq!(code, 2);
}

#[test]
fn selftest_quick_passes() {
    let (v, code) = json(&["selftest", "--level", "quick", "--json"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
}
