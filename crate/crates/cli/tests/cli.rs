use std::process::{Command, Output};

use serde_json::Value;

fn slkcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slkcat")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn simples(table: &Value) -> Vec<u64> {
    table["blocks"].as_array().unwrap().iter().map(|r| r["simples"].as_u64().unwrap()).collect()
}

#[test]
fn blocks_examples() {
    for (lambda, n, expect) in
        [("2,1", "3", vec![1, 2, 2, 1]), ("2", "2", vec![1, 1, 1]), ("1,1,1", "3", vec![1, 3, 3, 1])]
    {
        let out = slkcat(&["blocks", "--n", n, "--k", "2", "--lambda", lambda]);
        assert_eq!(code(&out), 0);
        let v = json(&out);
        let tables = v.as_array().unwrap();
        assert_eq!(tables.len(), 1);
        assert_eq!(simples(&tables[0]), expect, "lambda {lambda}");
        for r in tables[0]["blocks"].as_array().unwrap() {
            assert_eq!(r["simples"], r["weight_dim"]);
        }
    }
}

#[test]
fn relations_default_sweep_passes() {
    let out = slkcat(&["relations"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v.as_array().unwrap().iter().flat_map(|r| r["relations"].as_array().unwrap()).all(|r| r["status"] != "fail"));
}

#[test]
fn serre_at_k2_is_skipped() {
    let out = slkcat(&["relations", "--relation", "serre", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let rel: Vec<&Value> = v.as_array().unwrap().iter().flat_map(|r| r["relations"].as_array().unwrap()).collect();
    assert!(!rel.is_empty());
    assert!(rel.iter().all(|r| r["status"] == "skipped"));
}

#[test]
fn perturbed_relations_fail() {
    let out = slkcat(&["relations", "--perturb"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let failed = v.as_array().unwrap().iter().flat_map(|r| r["relations"].as_array().unwrap()).find(|r| r["status"] == "fail");
    assert!(failed.unwrap()["counterexample"].is_string());
}

#[test]
fn daha_reports_epsilon() {
    let out = slkcat(&["daha", "--n", "2", "--m", "1", "--d", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["epsilon"], 1);
    assert_eq!(code(&slkcat(&["daha", "--n", "2", "--m", "1", "--d", "2", "--perturb"])), 1);
}

#[test]
fn kernels_on_small_geometries() {
    for n in ["1", "2"] {
        let out = slkcat(&["kernels", "--n", n, "--k", "2"]);
        assert_eq!(code(&out), 0, "n = {n}");
        let v = json(&out);
        assert_eq!(v["convention"]["sigma"], 1);
        assert_eq!(v["convention"]["orientation"], 1);
        assert!(!v["relations"].as_array().unwrap().is_empty());
    }
}

#[test]
fn perturbed_kernels_print_failure_matrix() {
    let out = slkcat(&["kernels", "--n", "2", "--perturb"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("no convention"));
    assert_eq!(err.lines().count(), 2 + 16);
    assert!(json(&out)["convention"].is_null());
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&slkcat(&["blocks", "--bogus"])), 2);
    assert_eq!(code(&slkcat(&["blocks", "--k", "1"])), 2);
    assert_eq!(code(&slkcat(&["blocks", "--n", "0"])), 2);
    assert_eq!(code(&slkcat(&["blocks", "--n", "4", "--lambda", "2,1"])), 2);
    assert_eq!(code(&slkcat(&["blocks", "--lambda", "1,2"])), 2);
    assert_eq!(code(&slkcat(&["relations", "--relation", "nope"])), 2);
    assert_eq!(code(&slkcat(&["kernels", "--variant", "CK7"])), 2);
    assert_eq!(code(&slkcat(&["daha", "--d", "0"])), 2);
    assert_eq!(code(&slkcat(&[])), 2);
}

#[test]
fn reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.json");
    let p2 = dir.path().join("b.json");
    for p in [&p1, &p2] {
        let out = slkcat(&["kernels", "--n", "3", "--jobs", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
}

#[test]
fn kernel_dump_shape() {
    let out = slkcat(&["dump", "--a", "1,1", "--i", "1", "--kind", "E", "--variant", "CK0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["src"], serde_json::json!([1, 1]));
    assert_eq!(v["dst"], serde_json::json!([2, 0]));
    assert_eq!(v["variant"], "CK0");
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e["f1"].is_array() && e["f2"].is_array() && e["value"].is_string()));
}
