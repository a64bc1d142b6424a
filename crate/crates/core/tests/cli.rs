use std::process::Command;

use serde_json::{json, Value};

fn wallcross(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wallcross")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json_of(args: &[&str]) -> Value {
    let (code, out, err) = wallcross(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn window_on_rank_one_torus() {
    let v = json_of(&["window", "--example", "torus-1111", "--delta", "1/2"]);
    assert_eq!(v["chars"], json!([[0], [1]]));
}

#[test]
fn wallcross_partition() {
    let v = json_of(&["wallcross", "--example", "torus-1111", "--from", "1/2", "--to", "3/2"]);
    assert_eq!(v["common"], json!([[1]]));
    assert_eq!(v["faces"][0]["chars"], json!([[0]]));
    assert_eq!(v["faces"][0]["images"], json!([[2]]));
    assert_eq!(v["faces"][0]["d_plus"], json!(2));
}

#[test]
fn input_file_matches_example() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("rep.json");
    std::fs::write(&p, r#"{"root_datum": {"builtin": "torus", "rank": 1}, "weights": [[1], [1], [-1], [-1]]}"#).unwrap();
    let a = json_of(&["window", "--input", p.to_str().unwrap(), "--delta", "1/2"]);
    let b = json_of(&["window", "--example", "torus-1111", "--delta", "1/2"]);
    assert_eq!(a, b);
}

#[test]
fn malformed_input_exits_two() {
    let (code, _, err) = wallcross(&["window", "--example", "torus-1111", "--delta", "1/0"]);
    assert_eq!(code, 2);
    assert!(err.contains("1/0"), "{err}");
    let (code, _, err) = wallcross(&["window", "--example", "torus-1111", "--delta", "1/2,1/2"]);
    assert_eq!(code, 2);
    assert!(err.contains("InvalidInput"), "{err}");
    let (code, _, err) = wallcross(&["wallcross", "--example", "torus-1111", "--from", "1/2", "--to", "5/2"]);
    assert_eq!(code, 2);
    assert!(err.contains("NotAdjacent"), "{err}");
    let (code, _, _) = wallcross(&["window", "--input", "/nonexistent.json", "--delta", "1/2"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = wallcross(&["verify"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], json!(true));
    assert!(v["total"].as_u64().unwrap() > 10);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"root_datum": {"builtin": "torus", "rank": 1}, "weights": [[1], [1], [-1]]}"#).unwrap();
    let (code, out, _) = wallcross(&["verify", "--suite", "input", "--input", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("NotQuasiSymmetric"));

    let (code, _, err) = wallcross(&["verify", "--suite", ""]);
    assert_eq!(code, 0);
    assert!(err.contains("warning"));
}

#[test]
fn output_is_independent_of_thread_count() {
    let args = ["verify", "--random", "8", "--seed", "5", "--paths", "20"];
    let (c1, a, _) = wallcross(&[&args[..], &["--threads", "1"]].concat());
    let (c4, b, _) = wallcross(&[&args[..], &["--threads", "4"]].concat());
    assert_eq!((c1, c4), (0, 0));
    assert_eq!(a, b);
    let g1 = wallcross(&["wallcross", "--example", "gl2-sym3", "--from", "0,0", "--to", "1,1", "--threads", "1"]);
    let g3 = wallcross(&["wallcross", "--example", "gl2-sym3", "--from", "0,0", "--to", "1,1", "--threads", "3"]);
    assert_eq!(g1, g3);
}

#[test]
fn cy_report() {
    let v = json_of(&["cy", "--a", "1,1,1,1,1", "--d", "5", "--twist", "0"]);
    assert_eq!(v["arrangement"], json!("Z"));
    assert_eq!(v["window_size"], json!(6));
    assert_eq!((v["d_plus"].clone(), v["d_minus"].clone()), (json!(6), json!(2)));
    assert_eq!(v["twist_word_length"], json!(6));
    let v = json_of(&["cy", "--a", "1,1,1,1,1,1", "--d", "3,3", "--twist", "-1"]);
    assert_eq!(v["arrangement"], json!("Z+1/2"));
    assert_eq!(v["twist_word_length"], json!(8));
}

#[test]
fn groupoid_reduce_and_mutate() {
    let v = json_of(&["groupoid", "reduce", "x(1,+);t(1);x(2,-)", "--example", "torus-1111"]);
    assert_eq!(v["normal_form"], json!("t(1)"));
    let v = json_of(&["groupoid", "reduce", "x(1,+);x(2,+)", "--example", "torus-1111"]);
    assert_eq!(v["positive"], json!(true));
    assert_eq!(v["minimal"], json!(true));
    let v = json_of(&["mutate", "--example", "torus-1111", "--from", "1/2", "--to", "3/2", "--steps", "2"]);
    assert_eq!(v["period"], json!(2));
    assert_eq!(v["trace"].as_array().unwrap().len(), 3);
    assert_eq!(v["trace"][0]["atoms"], v["trace"][2]["atoms"]);
}

#[test]
fn complex_and_faces() {
    let v = json_of(&["complex", "--example", "torus-1111", "--from", "1/2", "--to", "3/2", "--chi", "0"]);
    assert_eq!(v[0]["degrees"]["0"], json!([{"weight": [0], "multiplicity": 1}]));
    assert_eq!(v[0]["violations"], json!([]));
    let v = json_of(&["faces", "--example", "gl2-sym3", "--from", "0,0", "--to", "1,1"]);
    assert_eq!(v["faces"].as_array().unwrap().len(), 2);
}

#[test]
fn svg_export() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let v = json_of(&["export-svg", "--example", "gl2-sym3", "--from", "0,0", "--to", "1,1", "--out", out]);
    assert_eq!(v["files"].as_array().unwrap().len(), 4);
    let mu = std::fs::read_to_string(dir.path().join("mu.svg")).unwrap();
    assert_eq!(mu.matches("class=\"mu-arrow\"").count(), 3);
    let (code, svg, _) = wallcross(&["window", "--example", "torus-1111", "--delta", "1/2", "--format", "svg"]);
    assert_eq!(code, 0);
    assert!(svg.starts_with("<svg"));
}
