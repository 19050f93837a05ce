use std::collections::BTreeSet;
use std::process::{Command, Output};

use serde_json::Value;

fn clocklat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clocklat")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = clocklat(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    clocklat(args).status.code().unwrap()
}

#[test]
fn grid_height() {
    let v = json(&["height", "--fixture", "grid_3_3", "--format", "json"]);
    assert_eq!(v["height"], 10);
    assert_eq!(v["clock_number"], 11);
    assert_eq!(v["num_states"], 36);
    assert_eq!(v["s_list"], serde_json::json!([9, 1]));
}

#[test]
fn verify_mode_runs_all_routes() {
    let v = json(&["height", "--fixture", "grid_3_3", "--verify", "--format", "json"]);
    assert_eq!(v["verify"], serde_json::json!({ "bfs": 10, "symdiff": 10, "peel": 10 }));
    // Over the cap the BFS route is skipped, the formulas still have to agree.
    let v = json(&["height", "--fixture", "grid_5_7", "--verify", "--format", "json"]);
    assert_eq!(v["verify"]["bfs"], Value::Null);
    assert_eq!(v["height"], 53);
}

#[test]
fn trefoil_from_pd() {
    let v = json(&["height", "--pd", "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]", "--stars", "auto", "--format", "json"]);
    assert_eq!(v["height"], 2);
}

#[test]
fn decompositions() {
    let v = json(&["decompose", "--fixture", "k11n157"]);
    assert_eq!(v["cycles"].as_array().unwrap().len(), 2);
    assert_eq!(v["leaves"].as_array().unwrap().len(), 1);
    let v = json(&["decompose", "--fixture", "grid_5_5", "--route", "peel"]);
    let s: Vec<u64> = v["cycles"].as_array().unwrap().iter().map(|c| c["s"].as_u64().unwrap()).collect();
    assert_eq!(s, [25, 9, 1]);
}

#[test]
fn exit_statuses() {
    assert_eq!(code(&["decompose", "--fixture", "curl", "--strict"]), 3);
    assert_eq!(code(&["height", "--fixture", "granny_shadow", "--strict"]), 3);
    assert_eq!(code(&["parse", "--pd", "X[1,2,3"]), 2);
    assert_eq!(code(&["parse", "--fixture", "nope"]), 2);
    assert_eq!(code(&["height", "--fixture", "grid_5_5", "--cap", "10"]), 4);
    assert_eq!(code(&["height", "--fixture", "trefoil", "--stars", "0,4"]), 3);
    assert_eq!(code(&["verify", "--fixture", "k11n157"]), 0);
    assert_eq!(code(&["height", "--pd", "X[1,1,2,2]", "--fixture", "curl"]), 2);
}

fn dot_edges(dot: &str, arrow: &str) -> Vec<(String, String)> {
    dot.lines()
        .filter_map(|l| l.trim().split_once(arrow))
        .map(|(a, b)| (a.trim().to_string(), b.split_whitespace().next().unwrap().trim_end_matches(';').to_string()))
        .collect()
}

#[test]
fn lattice_export_has_one_bottom_and_one_top() {
    let out = clocklat(&["export", "lattice", "--fixture", "abe6"]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    let edges = dot_edges(&dot, "->");
    let nodes: BTreeSet<&String> = edges.iter().flat_map(|(a, b)| [a, b]).collect();
    assert_eq!(nodes.len(), 13);
    let tails: BTreeSet<&String> = edges.iter().map(|(a, _)| a).collect();
    let heads: BTreeSet<&String> = edges.iter().map(|(_, b)| b).collect();
    assert_eq!(nodes.iter().filter(|n| !heads.contains(*n)).count(), 1);
    assert_eq!(nodes.iter().filter(|n| !tails.contains(*n)).count(), 1);
}

#[test]
fn gamma_export_colors_both_classes() {
    let out = clocklat(&["export", "gamma", "--fixture", "grid_3_3"]);
    let dot = String::from_utf8(out.stdout).unwrap();
    let nodes: BTreeSet<String> = dot_edges(&dot, "--").into_iter().flat_map(|(a, b)| [a, b]).collect();
    assert_eq!(nodes.len(), 16);
    assert_eq!(nodes.iter().filter(|n| n.starts_with('b')).count(), 8);
}

#[test]
fn exports_are_deterministic() {
    for args in [
        &["export", "gamma", "--fixture", "k11n157"][..],
        &["export", "lattice", "--fixture", "abe6"],
        &["export", "morse", "--fixture", "figure8"],
        &["export", "lattice", "--fixture", "grid_3_3", "--format", "json"],
    ] {
        assert_eq!(clocklat(args).stdout, clocklat(args).stdout, "{args:?}");
    }
    let path = std::env::temp_dir().join(format!("clocklat-{}.dot", std::process::id()));
    let target = path.to_str().unwrap();
    assert_eq!(code(&["export", "gamma", "--fixture", "trefoil", "--out", target]), 0);
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, clocklat(&["export", "gamma", "--fixture", "trefoil"]).stdout);
}

#[test]
fn morse_export_keeps_the_stars_critical() {
    let v = json(&["export", "morse", "--fixture", "trefoil", "--state", "2"]);
    assert_eq!(v["pairing"]["critical"].as_array().unwrap().len(), 2);
    assert_eq!(v["critical_dims"], serde_json::json!([0, 2]));
}

#[test]
fn file_inputs() {
    let dir = std::env::temp_dir();
    let pd = dir.join(format!("clocklat-{}.pd", std::process::id()));
    std::fs::write(&pd, "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]\n").unwrap();
    let v = json(&["matchings", "--file", pd.to_str().unwrap(), "--format", "json"]);
    assert_eq!(v["count"], 3);
    std::fs::remove_file(&pd).unwrap();

    let gamma = dir.join(format!("clocklat-{}.json", std::process::id()));
    let grid = clocklat(&["grid", "3", "5"]).stdout;
    std::fs::write(&gamma, grid).unwrap();
    let v = json(&["lattice", "--file", gamma.to_str().unwrap(), "--format", "json"]);
    std::fs::remove_file(&gamma).unwrap();
    assert_eq!(v["summary"]["height"], 18);
    assert_eq!(v["summary"]["num_states"], 281);
}

#[test]
fn fixture_listing_and_round_trip() {
    let list = String::from_utf8(clocklat(&["fixture"]).stdout).unwrap();
    assert!(list.lines().any(|l| l == "k11n157"));
    let v = json(&["fixture", "figure8"]);
    assert_eq!(v["crossings"].as_array().unwrap().len(), 4);
    let v = json(&["parse", "--fixture", "k11n157", "--format", "json"]);
    assert_eq!(v["universe"]["crossings"], 11);
    assert_eq!(v["universe"]["faces"], 13);
    assert_eq!(v["gamma"]["squares"], 15);
}
