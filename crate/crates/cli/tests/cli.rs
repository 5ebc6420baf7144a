use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(format!("{name}.json"))
}

fn flatfold(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatfold")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_square_passes_with_three_cones() {
    let out = flatfold(&["check", path(&instance("square_diagonal"))]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["cone_points"]["n"], 3);
}

#[test]
fn check_over_two_pi_fails_with_offending_class() {
    let out = flatfold(&["check", path(&instance("over_two_pi"))]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let angle = &doc["conditions"]["angle_bound"];
    assert_eq!(angle["pass"], false);
    assert_eq!(angle["offending"].as_array().unwrap().len(), 1);
}

#[test]
fn missing_file_is_an_error() {
    let out = flatfold(&["check", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("io:"));
    assert_eq!(flatfold(&["solve", "/nonexistent/instance.json"]).status.code(), Some(2));
}

#[test]
fn nonpositive_tolerance_rejected() {
    let out = flatfold(&["check", path(&instance("square_diagonal")), "--tolerance-angle", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_hexagon_gives_equilateral_triangle() {
    let out = flatfold(&["solve", path(&instance("hexagon"))]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"], "flat");
    assert_eq!(doc["tolerances"]["angle"], 1e-7);
    let poly: Vec<[f64; 2]> = serde_json::from_value(doc["polygon"].clone()).unwrap();
    assert_eq!(poly.len(), 3);
    for k in 0..3 {
        let (a, b) = (poly[k], poly[(k + 1) % 3]);
        let side = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        assert!((side - 3f64.sqrt()).abs() < 1e-9, "{side}");
    }
}

#[test]
fn solve_tetrahedron_is_not_flat() {
    let out = flatfold(&["solve", path(&instance("tetrahedron"))]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["verdict"], "not_flat");
    assert_eq!(doc["statistics"]["cone_points"], 4);
    assert_eq!(doc["statistics"]["starts_explored"], 3);
}

#[test]
fn solve_invalid_gluing_is_an_error() {
    let out = flatfold(&["solve", path(&instance("over_two_pi"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gluing:"));
}

#[test]
fn latin_cross_svg_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("cross.svg");
    let out = flatfold(&["solve", path(&instance("latin_cross")), "--svg", svg.to_str().unwrap(), "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains(r#"width="1000" height="1000""#));
    assert!(text.contains("<line"));
    let log = String::from_utf8_lossy(&out.stderr);
    assert!(log.lines().any(|l| l.starts_with("start (v0,v1)#0") && l.ends_with("reject premature-loop")), "{log}");
    assert!(log.lines().any(|l| l.ends_with("closed")));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let docs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let file = dir.path().join(format!("run{k}.json"));
            let out = flatfold(&["solve", path(&instance("latin_cross")), "--out", file.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(0));
            assert!(out.stdout.is_empty());
            std::fs::read(file).unwrap()
        })
        .collect();
    assert_eq!(docs[0], docs[1]);
}

#[test]
fn oracle_flag_agrees() {
    let main = flatfold(&["solve", path(&instance("latin_cross"))]);
    let oracle = flatfold(&["solve", path(&instance("latin_cross")), "--oracle"]);
    assert_eq!(oracle.status.code(), Some(0));
    let a: Value = serde_json::from_slice(&main.stdout).unwrap();
    let b: Value = serde_json::from_slice(&oracle.stdout).unwrap();
    assert_eq!(a["rim"]["order"], b["rim"]["order"]);
    let (pa, pb): (Vec<[f64; 2]>, Vec<[f64; 2]>) =
        (serde_json::from_value(a["polygon"].clone()).unwrap(), serde_json::from_value(b["polygon"].clone()).unwrap());
    for (p, q) in pa.iter().zip(&pb) {
        assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9);
    }
}
