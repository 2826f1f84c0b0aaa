use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kspenta(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kspenta")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.push("--json");
    let out = kspenta(&full);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const COMMANDS: &[&[&str]] = &[
    &["pentagram"],
    &["rays"],
    &["rays", "--table-check"],
    &["relations"],
    &["relations", "--enumerate-octads"],
    &["search", "--system", "rank1"],
    &["search", "--system", "rank2", "--max-satisfiable"],
    &["pairings", "--paper"],
    &["pairings", "--enumerate"],
    &["hypergraph", "--format", "dot"],
    &["hypergraph", "--format", "json"],
];

#[test]
fn every_command_emits_a_versioned_report() {
    for args in COMMANDS {
        let v = json(args);
        assert_eq!(v["schema_version"], "kspenta.run-report/1", "{args:?}");
        assert_eq!(v["command"], args[0]);
        assert_eq!(v["inputs_digest"].as_str().unwrap().len(), 64);
        assert_eq!(v["passed"], true);
        let checks = v["checks"].as_array().unwrap();
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c["pass"] == true && c["name"].is_string() && c["details"].is_string()));
        assert!(v["outputs"].is_object());
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in COMMANDS {
        for mode in [vec![], vec!["--json"]] {
            let full: Vec<&str> = args.iter().copied().chain(mode.iter().copied()).collect();
            let (a, b) = (kspenta(&full), kspenta(&full));
            assert_eq!(a.stdout, b.stdout, "{full:?}");
            assert!(a.stderr.is_empty(), "{full:?}: {}", String::from_utf8_lossy(&a.stderr));
        }
    }
}

#[test]
fn search_rank2_is_unsat() {
    let out = kspenta(&["search", "--system", "rank2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("UNSAT"));
    let v = json(&["search", "--system", "rank2"]);
    assert_eq!(v["result"], "UNSAT");
    assert_eq!(v["outputs"]["search"]["result"], "UNSAT");
    assert_eq!(v["outputs"]["outcomes"], 30);
}

#[test]
fn max_satisfiable_is_reported() {
    for system in ["rank1", "rank2"] {
        let v = json(&["search", "--system", system, "--max-satisfiable"]);
        assert_eq!(v["outputs"]["max_satisfiable"]["value"], 14);
    }
}

#[test]
fn pairings_enumerate_counts_243() {
    let v = json(&["pairings", "--enumerate"]);
    assert_eq!(v["count"], 243);
    assert_eq!(v["outputs"]["enumeration"]["count"], 243);
    assert_eq!(v["outputs"]["enumeration"]["proofs"].as_array().unwrap().len(), 243);
}

#[test]
fn paper_pairing_export() {
    let v = json(&["pairings"]);
    let proof = &v["outputs"]["paper"]["proof"];
    assert_eq!(proof["relations"].as_array().unwrap().len(), 15);
    assert_eq!(proof["planes"].as_array().unwrap().len(), 30);
}

#[test]
fn pentagram_has_no_sign_assignment() {
    let v = json(&["pentagram"]);
    assert_eq!(v["outputs"]["sign_assignments"], 0);
    assert_eq!(v["outputs"]["contexts"][4]["product_sign"], -1);
}

#[test]
fn table_check_flags_six_rows() {
    let v = json(&["rays", "--table-check"]);
    let ids: Vec<u64> =
        v["outputs"]["table"]["overrides"].as_array().unwrap().iter().map(|o| o["id"].as_u64().unwrap()).collect();
    assert_eq!(ids, vec![12, 14, 15, 16, 24, 40]);
    assert_eq!(v["outputs"]["rays"].as_array().unwrap().len(), 40);
}

#[test]
fn octad_enumeration() {
    let v = json(&["relations", "--enumerate-octads"]);
    assert_eq!(v["outputs"]["octads"].as_array().unwrap().len(), 25);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["search", "--system", "missing.json"],
        vec!["frobnicate"],
        vec!["pentagram", "--bogus"],
        vec!["hypergraph", "--format", "svg"],
        vec!["search"],
        vec![],
    ] {
        let out = kspenta(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    let out = kspenta(&["search", "--system", "missing.json"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn system_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let sat = dir.path().join("sat.json");
    std::fs::write(&sat, r#"{"outcomes":[1,2,3,4],"contexts":[[1,2],[3,4],[1,3]]}"#).unwrap();
    let v = json(&["search", "--system", sat.to_str().unwrap()]);
    assert_eq!(v["result"], "SAT");
    let ones: Vec<u64> =
        v["outputs"]["search"]["witness"].as_object().unwrap().iter().filter(|(_, x)| **x == 1).map(|(k, _)| k.parse().unwrap()).collect();
    assert_eq!(ones.len(), 2);

    let odd = dir.path().join("triangle.json");
    std::fs::write(&odd, r#"{"outcomes":[1,2,3],"contexts":[[1,2],[2,3],[3,1]]}"#).unwrap();
    let v = json(&["search", "--system", odd.to_str().unwrap()]);
    assert_eq!(v["result"], "UNSAT");
    assert_eq!(v["outputs"]["certificate"]["valid"], true);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"outcomes":[1],"contexts":[[2]]}"#).unwrap();
    assert_eq!(kspenta(&["search", "--system", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn file_digest_tracks_contents() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let digest = |body: &str| {
        std::fs::write(&path, body).unwrap();
        json(&["search", "--system", path.to_str().unwrap()])["inputs_digest"].clone()
    };
    let a = digest(r#"{"outcomes":[1,2],"contexts":[[1,2]]}"#);
    let b = digest(r#"{"outcomes":[1,2,3],"contexts":[[1,2,3]]}"#);
    assert_ne!(a, b);
    assert_eq!(a, digest(r#"{"outcomes":[1,2],"contexts":[[1,2]]}"#));
}

fn assert_written(path: &Path, expect_prefix: &str) -> String {
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with(expect_prefix), "{text:.40}");
    text
}

#[test]
fn hypergraph_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("planes.dot");
    let out = kspenta(&["hypergraph", "--out", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = assert_written(&dot, "graph planes {");
    assert_eq!(text.lines().filter(|l| l.contains("[label=")).count(), 30);
    assert_eq!(text.lines().filter(|l| l.contains("subgraph cluster_h")).count(), 15);

    let js = dir.path().join("planes.json");
    let v = json(&["hypergraph", "--format", "json", "--out", js.to_str().unwrap()]);
    assert_eq!(v["outputs"]["edges"], 105);
    let doc: Value = serde_json::from_str(&assert_written(&js, "{")).unwrap();
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 30);
    assert_eq!(doc["hyperedges"].as_array().unwrap().len(), 15);
}

#[test]
fn hypergraph_to_stdout_is_the_bare_document() {
    let out = kspenta(&["hypergraph"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph planes {"));
    assert!(text.trim_end().ends_with('}'));
}
