//! End-to-end runs of the `galerob` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    run_in(args, None)
}

fn run_in(args: &[&str], dir: Option<&PathBuf>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_galerob"));
    cmd.args(args).env_remove("GALEROB_OUTPUT_DIR");
    if let Some(d) = dir {
        cmd.env("GALEROB_OUTPUT_DIR", d);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("galerob-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn values(o: &Output) -> Vec<String> {
    stdout(o).lines().map(|l| l.split(", ").nth(1).unwrap().to_string()).collect()
}

#[test]
fn somos4_numbers() {
    let o = run(&["sequence", "--spec", "1,2,4", "--n-max", "9", "--ones"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(values(&o), ["1", "1", "1", "1", "2", "3", "7", "23", "59"]);
    assert!(stdout(&o).starts_with("1, 1\n2, 1\n"));
}

#[test]
fn somos5_numbers() {
    let o = run(&["sequence", "--spec", "1,2,5", "--n-max", "11", "--ones"]);
    assert_eq!(values(&o)[5..], ["2", "3", "5", "11", "37", "83"]);
}

#[test]
fn common_factor_is_a_usage_error() {
    let o = run(&["sequence", "--spec", "2,4,6", "--n-max", "9", "--ones"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("common factor 2"), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
}

#[test]
fn malformed_arguments_exit_two() {
    for args in [
        &["sequence", "--spec", "1,2", "--n-max", "5"][..],
        &["tiling", "--spec", "1,2,5", "--rows", "2:-2", "--cols", "0:1"],
        &["verify", "kuo", "--spec", "1,2,4", "--n", "4"],
        &["cluster-var", "--spec", "1,2,4", "--n", "0"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn polynomial_sequence_streams_json_lines() {
    let o = run(&["sequence", "--spec", "1,2,4", "--n-max", "7"]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 7);
    for (k, v) in lines.iter().enumerate() {
        assert_eq!(v["schema"], 1);
        assert_eq!(v["index"], k + 1);
        assert_eq!(v["n"], 4);
    }
    // x̂_5 = (x2 x4 + y1 x3²) / x1.
    let terms = lines[4]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert!(terms.iter().all(|t| t["coeff"] == "1"));
}

#[test]
fn cluster_variable_methods_agree() {
    let by = |m: &str| stdout(&run(&["cluster-var", "--spec", "2,3,7", "--n", "13", "--method", m]));
    let mutation = by("mutation");
    assert_eq!(mutation, by("recurrence"));
    assert_eq!(mutation, by("matchings"));
}

#[test]
fn matching_count_is_the_sequence_value() {
    let seq = run(&["sequence", "--spec", "2,3,7", "--n-max", "16", "--ones"]);
    let count = run(&["matchings", "--spec", "2,3,7", "--n", "16", "--count"]);
    assert_eq!(stdout(&count).trim(), values(&seq)[15]);
    let list = run(&["matchings", "--spec", "1,2,4", "--n", "8", "--list"]);
    assert_eq!(stdout(&list).lines().count(), 23);
}

#[test]
fn theorem_sweeps_pass() {
    for (spec, n_max) in [("1,2,4", "12"), ("2,3,7", "16")] {
        let o = run(&["verify", "theorem", "--spec", spec, "--n-max", n_max]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stdout(&o).lines().skip(1).all(|l| l.ends_with(", ok")));
    }
}

#[test]
fn corrupted_weight_is_caught() {
    let o = run(&["verify", "theorem", "--spec", "1,2,4", "--n-max", "10", "--corrupt-weight", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("8, 15, FAIL"));
    assert!(stderr(&o).contains("n=8: coefficient of x1 is 0 by mutation and 1 by matchings"), "{}", stderr(&o));
}

#[test]
fn other_sweeps_pass() {
    for args in [
        &["verify", "kuo", "--spec", "2,3,7", "--n", "14"][..],
        &["verify", "heights", "--spec", "1,2,5", "--n", "11"],
        &["verify", "borders", "--spec", "1,2,5", "--n-max", "14"],
        &["verify", "cvectors", "--spec", "2,3,7"],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    }
    let kuo = run(&["verify", "kuo", "--spec", "1,2,4", "--n", "9"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&kuo)).unwrap();
    assert_eq!(v["schema"], 1);
    assert!(v["counterexample"].is_null());
    assert_eq!(v["weighted_recurrence"], true);
}

#[test]
fn renders_are_deterministic_and_land_in_the_output_dir() {
    let dir = scratch("render");
    let args = ["render", "tiling", "--spec", "1,2,5", "--rows", "-2:2", "--cols", "-3:3"];
    let first = run_in(&args, Some(&dir));
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let path = PathBuf::from(stdout(&first).trim());
    assert!(path.starts_with(&dir));
    let a = std::fs::read(&path).unwrap();
    run_in(&args, Some(&dir));
    assert_eq!(a, std::fs::read(&path).unwrap());
    assert!(String::from_utf8(a).unwrap().starts_with("<svg"));

    let p = run_in(&["render", "pinecone", "--spec", "2,3,7", "--n", "16", "--highlight-minimal"], Some(&dir));
    let svg = std::fs::read_to_string(stdout(&p).trim()).unwrap();
    // Five strips with 38 vertices; the matching covers them with 19 edges.
    assert_eq!(svg.matches("<circle").count(), 38);
    assert_eq!(svg.matches("#d0021b").count(), 19);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unwritable_output_is_reported() {
    let o = run(&["render", "pinecone", "--spec", "1,2,4", "--n", "7", "--out", "/nonexistent-dir/x.svg"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot write"));
}

#[test]
fn structure_dumps_are_versioned() {
    let o = run(&["pinecone", "--spec", "1,2,4", "--n", "8", "--construction", "aztec"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    let strips: serde_json::Value =
        serde_json::from_str(&stdout(&run(&["pinecone", "--spec", "1,2,4", "--n", "8"]))).unwrap();
    assert_eq!(v["edges"], strips["edges"]);
    let t = run(&["tiling", "--spec", "1,2,5", "--rows", "0:0", "--cols", "0:4", "--format", "json"]);
    let t: serde_json::Value = serde_json::from_str(&stdout(&t)).unwrap();
    assert_eq!(t["schema"], 1);
    assert_eq!(t["cells"].as_array().unwrap().len(), 5);
}
