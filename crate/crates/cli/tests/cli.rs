use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn jsnorm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jsnorm"))
        .args(args)
        .current_dir(dir)
        .env_remove("JSNORM_BUDGET_OVERRIDE")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn write(dir: &Path, name: &str, v: Value) {
    std::fs::write(dir.join(name), v.to_string()).unwrap();
}

fn depth_one(dir: &Path) {
    write(
        dir,
        "family.json",
        json!({
            "ground": ["0:0", "1:0", "1:1"],
            "members": [["0:0"], ["1:0"], ["1:1"], ["0:0", "1:0"], ["0:0", "1:1"]],
            "provenance": "tree-segments",
        }),
    );
    write(dir, "ones.json", json!({"entries": {"0:0": "1/1", "1:0": "1/1", "1:1": "1"}}));
}

#[test]
fn norm_of_ones_on_depth_one_segments() {
    let dir = tempfile::tempdir().unwrap();
    depth_one(dir.path());
    let out = jsnorm(dir.path(), &["norm", "--family", "family.json", "--vector", "ones.json", "--precision", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "norm");
    assert_eq!(r["status"], "ok");
    assert_eq!(r["result"]["norm_sq"], "5/1");
    assert_eq!(r["result"]["norm_decimal"], "2.2360679774");
    assert_eq!(r["result"]["method"], "oracle");
}

#[test]
fn tree_dp_agrees_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    depth_one(dir.path());
    let tree = jsnorm(dir.path(), &["generate", "dyadic-tree", "--depth", "1", "--out", "tree.json"]);
    assert_eq!(tree.status.code(), Some(0));
    assert!(tree.stdout.is_empty());
    let out = jsnorm(dir.path(), &["norm", "--tree", "tree.json", "--vector", "ones.json", "--method", "tree-dp"]);
    let r = report(&out);
    assert_eq!(r["result"]["norm_sq"], "5/1");
    assert_eq!(r["result"]["method"], "tree-dp");
}

#[test]
fn check_ci_passes_on_segments() {
    let dir = tempfile::tempdir().unwrap();
    depth_one(dir.path());
    let out = jsnorm(dir.path(), &["check-ci", "--family", "family.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for c in ["condition_a", "condition_b", "condition_c"] {
        assert_eq!(r["result"][c]["passed"], true, "{c}");
    }
}

#[test]
fn check_ci_failure_carries_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "family.json",
        json!({"ground": ["a", "b", "c"], "members": [["a"], ["c"], ["a", "b"], ["b", "c"]]}),
    );
    let out = jsnorm(dir.path(), &["check-ci", "--family", "family.json"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["status"], "failed");
    assert_eq!(r["result"]["witnesses_replay"], true);
    assert!(r["inputs"]["files"]["family"].is_object());
}

#[test]
fn malformed_vector_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    depth_one(dir.path());
    std::fs::write(dir.path().join("bad.json"), "{\"entries\": {\"0:0\": \"one\"}}").unwrap();
    let out = jsnorm(dir.path(), &["norm", "--family", "family.json", "--vector", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    assert_eq!(r["status"], "usage-error");
    assert!(r["error"].as_str().unwrap().contains("invalid rational"));

    let out = jsnorm(dir.path(), &["norm", "--family", "missing.json", "--vector", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    depth_one(dir.path());
    let out = jsnorm(dir.path(), &["norm", "--family", "family.json", "--vector", "ones.json", "--precision", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = jsnorm(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_budget_is_a_resource_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = jsnorm(dir.path(), &["suite", "--state-budget", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(report(&out)["status"], "resource-error");
}

#[test]
fn budget_override_caps_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    depth_one(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_jsnorm"))
        .args(["norm", "--family", "family.json", "--vector", "ones.json"])
        .current_dir(dir.path())
        .env("JSNORM_BUDGET_OVERRIDE", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_jsnorm"))
        .args(["norm", "--family", "family.json", "--vector", "ones.json"])
        .current_dir(dir.path())
        .env("JSNORM_BUDGET_OVERRIDE", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_chain_into_later_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let rezn = ["--trees", "3", "--stages", "5", "--pool", "6", "--seed", "9"];
    let built = jsnorm(p, &[&["build-reznichenko", "--out", "system.json"][..], &rezn].concat());
    assert_eq!(built.status.code(), Some(0));
    let sig = jsnorm(p, &[&["generate", "signature-partition", "--out", "sig.json"][..], &rezn].concat());
    assert_eq!(sig.status.code(), Some(0));

    // Every segment meets each signature block once, so a threshold of 2 cannot be met.
    let out = jsnorm(p, &["search-partition", "--system", "system.json", "--partition", "sig.json", "--threshold", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["result"]["found"], false);
    assert!(r["inputs"]["files"]["system"]["system"].is_object());

    let out = jsnorm(p, &["search-partition", "--system", "system.json", "--partition", "sig.json", "--threshold", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["witness"]["count"], 1);
}

#[test]
fn talagrand_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let gen = jsnorm(p, &["generate", "admissible", "--base", "2", "--length", "2", "--max-size", "2", "--out", "adm.json"]);
    assert_eq!(gen.status.code(), Some(0));
    write(p, "all.json", json!({"blocks": [["00", "01", "10", "11"]]}));
    write(p, "points.json", json!({"blocks": [["00"], ["01"], ["10"], ["11"]]}));
    let out = jsnorm(
        p,
        &["qe-search", "--family", "adm.json", "--partition", "all.json", "--gamma-d", "points.json", "--threshold", "2"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["witness"]["s"].as_array().unwrap().len(), 2);

    let out = jsnorm(p, &["eberleinize", "--base", "2", "--length", "2", "--max-size", "2"]);
    let r = report(&out);
    let again = jsnorm(p, &["eberleinize", "--family", "adm.json", "--strata", "adm.json"]);
    assert_eq!(again.stdout, out.stdout);
    let sets = r["result"]["sets"].as_array().unwrap();
    assert!(sets.iter().any(|s| s.as_object().unwrap().values().all(|w| w == "1/2")));

    write(p, "supports.json", json!({"x": ["a", "b"], "y": ["b"], "z": ["c"]}));
    let out = jsnorm(p, &["saturate", "--supports", "supports.json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["blocks"].as_array().unwrap().len(), 2);
    assert_eq!(r["result"]["verified"], true);
}

#[test]
fn disjointify_and_weighted_norm() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    depth_one(p);
    write(p, "sets.json", json!([["0:0", "1:0"], ["0:0", "1:1"]]));
    let out = jsnorm(p, &["disjointify", "--family", "family.json", "--sets", "sets.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["parts"], json!([["0:0", "1:0"], ["1:1"]]));

    write(p, "weighted.json", json!({"ground": ["a", "b"], "sets": [{"a": "1/2", "b": "1/2"}, {"a": "1"}, {"b": "1"}]}));
    write(p, "v.json", json!({"entries": {"a": "1", "b": "1"}}));
    let out = jsnorm(p, &["norm-re", "--weighted", "weighted.json", "--vector", "v.json"]);
    assert_eq!(report(&out)["result"]["norm_sq"], "2/1");
}
