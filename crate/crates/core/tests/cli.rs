mod common;

use std::process::{Command, Output};

use serde_json::Value;

use common::data_path;

fn birkhoff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_birkhoff")).args(args).env("BIRKHOFF_LOG", "quiet").output().unwrap()
}

fn data(name: &str) -> String {
    data_path(name).to_string_lossy().into_owned()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn validate_reports_counts() {
    let out = birkhoff(&["--format", "json", "validate", &data("t6.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!((v["vertices"].as_i64(), v["edges"].as_i64(), v["faces"].as_i64()), (Some(6), Some(12), Some(6)));
    assert_eq!(v["genus"], 1);
}

#[test]
fn word_has_twelve_lines() {
    let out = birkhoff(&["word", &data("t6.json"), &data("t6_acyclic.json"), "--representation", "first"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.trim().is_empty()).count(), 12);
}

#[test]
fn infeasible_class_is_a_certificate() {
    let out = birkhoff(&["--format", "json", "construct", &data("t6.json"), "--class", &data("t6_class_5_0.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["length"].as_i64().unwrap() < v["omega"].as_i64().unwrap());
}

#[test]
fn feasible_class_is_realized() {
    let out = birkhoff(&["--format", "json", "construct", &data("t6.json"), "--class", &data("t6_class_1_0.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["bits"].as_array().unwrap().len(), 12);
    assert_eq!(v["heights"].as_array().unwrap().len(), 6);
}

#[test]
fn domain_errors_exit_one_with_record() {
    let out = birkhoff(&["word", &data("t6.json"), &data("t6_up_right.json")]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "NotAcyclic");
    assert!(err["message"].is_string());
}

#[test]
fn io_and_parse_errors_exit_two() {
    let out = birkhoff(&["validate", "/nonexistent/map.json"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempdir();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = birkhoff(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = birkhoff(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("birkhoff-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn json_reports_round_trip_and_are_stable() {
    let runs: [&[&str]; 5] = [
        &["enumerate", &data("t6.json"), "--acyclic-only"],
        &["surface", &data("t6.json"), &data("t6_acyclic.json")],
        &["matrix", &data("genus2.json"), &data("genus2_acyclic.json")],
        &["connectivity", &data("t6.json"), "--class", &data("t6_class_3_0.json")],
        &["oracle", "--grid", "2", "3", "--coorientation", &data("t6_acyclic.json"), "--samples", "64"],
    ];
    for args in runs {
        let full: Vec<&str> = ["--format", "json", "--seed", "7"].iter().chain(args).copied().collect();
        let a = birkhoff(&full);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        let v = json_of(&a);
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
        let b = birkhoff(&full);
        assert_eq!(a.stdout, b.stdout, "{args:?} is not deterministic");
    }
}

#[test]
fn out_flag_writes_the_report() {
    let path = tempdir().join("validate.json");
    let out = birkhoff(&["--format", "json", "--out", path.to_str().unwrap(), "validate", &data("genus2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["genus"], 2);
}

#[test]
fn flip_run_and_compare() {
    let out = birkhoff(&["--format", "json", "flip-run", &data("t6.json"), &data("t6_acyclic.json")]);
    assert_eq!(out.status.code(), Some(0));
    for mode in ["hurwitz", "common"] {
        let out = birkhoff(&[
            "--format",
            "json",
            "compare",
            &data("t6.json"),
            &data("t6_acyclic.json"),
            &data("t6_acyclic.json"),
            "--mode",
            mode,
        ]);
        assert_eq!(out.status.code(), Some(0), "{mode}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
