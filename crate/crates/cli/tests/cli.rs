use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn coprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coprop")).args(args).output().expect("run coprop")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("coprop-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn enumerate_two_chains() {
    let out = coprop(&["enumerate", "--colours", "1", "--arity", "((1,1),(1,1);(1,1))"]);
    assert_eq!(out.status.code(), Some(0));
    let graphs = json(&out);
    assert_eq!(graphs.as_array().unwrap().len(), 2);
    assert!(graphs[0].get("node_order").is_some());
}

#[test]
fn enumerate_named_colours() {
    let out = coprop(&["enumerate", "--colours", "a,b", "--arity", "(([a],[b]);([a],[b]))"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out).as_array().unwrap().len(), 1);
}

#[test]
fn prop_operad_is_not_sigma_free() {
    let out = coprop(&["sigma-free", "--operad", "prop", "--colours", "1", "--max-nodes", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["free"], false);
    let w = &v["witness"];
    assert_eq!(w["signature"], "(([],[]),([],[]);([],[]))");
    assert_eq!(w["reconfirmed"], true);
    assert_eq!(w["graph"]["graph"]["nodes"], 2);
    assert_eq!(w["graph"]["graph"]["edges"], 0);
}

#[test]
fn constant_free_is_sigma_free() {
    let out = coprop(&["sigma-free", "--operad", "cf", "--colours", "1", "--max-nodes", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["free"], true);
}

#[test]
fn free_com_count() {
    let out = coprop(&["count-free", "--operad", "com", "--n", "3", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out), serde_json::json!({"count": 8}));
}

#[test]
fn verify_operad_passes() {
    let out = coprop(&["verify-operad", "--operad", "prop", "--colours", "1", "--max-nodes", "2", "--samples", "20", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert!(v["checks"].as_u64().unwrap() > 0);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_prop_passes() {
    let out = coprop(&["verify-prop", "--prop", "w:com", "--colours", "1", "--max-ports", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn grothendieck_agrees_with_bv() {
    let out = coprop(&["grothendieck", "--poset", "O<A,O<B"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["mismatches"].as_array().unwrap().len(), 0);
}

#[test]
fn malformed_input_exits_2() {
    for args in [
        &["enumerate", "--colours", "1", "--arity", "((1,1),(1,1);(1,1)"][..],
        &["enumerate", "--colours", "1", "--arity", "((1,1);x)"],
        &["count-free", "--operad", "nonsense", "--n", "1", "--m", "1"],
        &["pushout", "--instance", "nowhere", "--valence", "([c],[c])"],
        &["export-dot", "/definitely/not/here.json", "--emit-dot", "/tmp"],
    ] {
        let out = coprop(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn parse_errors_carry_positions() {
    let out = coprop(&["enumerate", "--colours", "1", "--arity", "((1,1)x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column 7"));
}

#[test]
fn output_is_deterministic() {
    let runs: Vec<Output> = (0..2).map(|_| coprop(&["enumerate", "--colours", "a,b", "--arity", "(([a],[b]),([b],[a]);([a],[a]))"])).collect();
    assert_eq!(runs[0].status.code(), Some(0));
    assert_eq!(runs[0].stdout, runs[1].stdout);
    let sig: Vec<Output> = (0..2).map(|_| coprop(&["sigma-free", "--operad", "prop", "--max-nodes", "2"])).collect();
    assert_eq!(sig[0].stdout, sig[1].stdout);
}

#[test]
fn compose_and_export() {
    let dir = scratch("compose");
    let chains = json(&coprop(&["enumerate", "--arity", "((1,1),(1,1);(1,1))"]));
    let chain = chains
        .as_array()
        .unwrap()
        .iter()
        .find(|g| g["graph"]["enters"].as_array().unwrap().iter().filter(|x| !x.is_null()).count() == 2)
        .unwrap();
    let path = dir.join("chain.json");
    fs::write(&path, chain.to_string()).unwrap();
    let p = path.to_str().unwrap();
    let out = coprop(&["compose", p, p, "--at", "1", "--emit-dot", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let g = json(&out);
    assert_eq!(g["node_order"].as_array().unwrap().len(), 3);
    assert!(dir.join("composite.dot").exists());

    let out = coprop(&["export-dot", p, "--emit-dot", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let dot = fs::read_to_string(dir.join("chain.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    // DOT never reaches stdout
    assert!(!String::from_utf8_lossy(&out.stdout).contains("digraph"));
}

#[test]
fn identity_pushout_passes() {
    let out = coprop(&["pushout", "--instance", "identity", "--valence", "([c],[c])", "--valence", "([c,c],[c])", "--level", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert!(v["verdicts"].as_array().unwrap().iter().all(|x| x["bijective"] == true));
}

#[test]
fn desk_pushout_with_dot() {
    let dir = scratch("desk");
    let out = coprop(&["pushout", "--instance", "desk", "--valence", "([c,c],[])", "--level", "2", "--emit-dot", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // two classes, ε and its twist, each drawn with a B-marked node
    let mut dots: Vec<PathBuf> = fs::read_dir(&dir).unwrap().map(|d| d.unwrap().path()).collect();
    dots.sort();
    assert_eq!(dots.len(), 2);
    for d in dots {
        assert!(fs::read_to_string(d).unwrap().contains("label=\"1 B\""));
    }
}

#[test]
fn non_full_inclusion_fails() {
    let out = coprop(&["pushout", "--instance", "non-full", "--valence", "([c],[c])", "--level", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["hypotheses"]["full"], false);
}
