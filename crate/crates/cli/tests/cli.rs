use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toda-polytope"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array().unwrap().iter().map(floats).collect()
}

fn write_input(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn hexagon_has_six_vertices_and_is_complete() {
    let r = json(&["analyze", "--example", "hexagon"]);
    assert_eq!(r["accessible_count"], 6);
    assert_eq!(r["spectrally_complete"], true);
    assert_eq!(r["near_threshold_minors"], 0);
    assert!(r["polytope"]["halfspaces"]
        .as_array()
        .unwrap()
        .iter()
        .all(|h| h["permutohedral"] == true));
}

#[test]
fn quadrilateral_has_four_vertices_and_one_chopping_facet() {
    let r = json(&["analyze", "--example", "quadrilateral"]);
    assert_eq!(r["accessible_count"], 4);
    assert_eq!(r["spectrally_complete"], false);
    let mut labels: Vec<String> = r["accessible"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["label"].as_str().unwrap().to_string())
        .collect();
    labels.sort();
    assert_eq!(labels, ["diag(1,2,4)", "diag(1,4,2)", "diag(2,1,4)", "diag(4,1,2)"]);
    let chopping: Vec<&Value> = r["polytope"]["halfspaces"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|h| h["permutohedral"] == false)
        .collect();
    assert!(!chopping.is_empty());
    assert!(chopping.iter().any(|h| h["set"] == serde_json::json!([1, 2]) && h["j_set"] == serde_json::json!([1, 3])));
}

#[test]
fn vertices_from_halfspaces_agree_with_extremal_vertices() {
    let r = json(&["analyze", "--example", "quadrilateral"]);
    let v = matrix(&r["polytope"]["vertices"]);
    let h = matrix(&r["polytope"]["vertices_from_halfspaces"]);
    assert_eq!(v.len(), h.len());
    for p in &v {
        assert!(h.iter().any(|q| close(p, q, 1e-9)), "{p:?} missing from {h:?}");
    }
}

#[test]
fn diagonal_input_gives_a_single_point() {
    let dir = TempDir::new().unwrap();
    let path = write_input(&dir, "diag.json", r#"{"matrix": [[4,0,0],[0,2,0],[0,0,1]]}"#);
    let r = json(&["analyze", "--input", &path]);
    assert_eq!(r["accessible_count"], 1);
    let v = matrix(&r["polytope"]["vertices"]);
    assert_eq!(v.len(), 1);
    assert!(close(&v[0], &[4.0, 2.0, 1.0], 1e-12));
}

#[test]
fn lambda_q_input_matches_matrix_input() {
    let dir = TempDir::new().unwrap();
    let s = 0.5f64.sqrt();
    let pair = write_input(
        &dir,
        "pair.json",
        &format!(r#"{{"lambda": [3, 1], "q": [[{s}, {s}], [{s}, -{s}]]}}"#),
    );
    let mat = write_input(&dir, "mat.json", r#"{"matrix": [[2, 1], [1, 2]]}"#);
    let a = json(&["analyze", "--input", &pair]);
    let b = json(&["analyze", "--input", &mat]);
    assert!(close(&floats(&a["bfr"]), &floats(&b["bfr"]), 1e-12));
    assert!(close(&floats(&a["bfr"]), &[2.0, 2.0], 1e-12));
}

#[test]
fn hexagon_limit_is_a_diagonal_vertex() {
    let r = json(&["limit", "--example", "hexagon", "--sigma", "-1", "0", "-2"]);
    let s = matrix(&r["matrix"]);
    let expected = [[2.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0, 0.0, 1.0]];
    for (row, want) in s.iter().zip(&expected) {
        assert!(close(row, want, 1e-9), "{s:?}");
    }
    assert_eq!(r["partition"], serde_json::json!([[2], [1], [3]]));
}

#[test]
fn zero_flow_returns_the_input() {
    let base = json(&["analyze", "--example", "hexagon"]);
    let r = json(&["flow", "--example", "hexagon", "--tau", "0", "0", "0"]);
    let samples = r["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 1);
    assert!(close(&floats(&samples[0]["bfr"]), &floats(&base["bfr"]), 1e-14));
    let m0 = matrix(&base["input"]["matrix"]);
    let m1 = matrix(&samples[0]["matrix"]);
    for (a, b) in m0.iter().zip(&m1) {
        assert!(close(a, b, 1e-14));
    }
}

#[test]
fn flow_preserves_trace_and_spectrum() {
    let r = json(&[
        "flow", "--example", "quadrilateral", "--tau", "1.5", "-0.5", "0.25", "--samples", "-2", "0.5", "3",
    ]);
    let trace: f64 = floats(&r["input"]["spectrum"]).iter().sum();
    for s in r["samples"].as_array().unwrap() {
        let x: f64 = floats(&s["bfr"]).iter().sum();
        assert!((x - trace).abs() < 1e-12);
        let m = matrix(&s["matrix"]);
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((v - m[j][i]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn invert_then_flow_reaches_the_target() {
    let target = ["2.5", "2.5", "2"];
    let mut args = vec!["invert", "--example", "hexagon", "--target"];
    args.extend(target);
    let inv = json(&args);
    assert!(inv["residual"].as_f64().unwrap() < 1e-10);
    let tau: Vec<String> = floats(&inv["tau"]).iter().map(|t| format!("{t:e}")).collect();
    let tau = format!("--tau={}", tau.join(","));
    let r = json(&["flow", "--example", "hexagon", &tau]);
    let x = floats(&r["samples"][0]["bfr"]);
    assert!(close(&x, &[2.5, 2.5, 2.0], 1e-9), "{x:?}");
}

#[test]
fn render_labels_every_vertex() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("quad.svg");
    let status = run(&[
        "render",
        "--example",
        "quadrilateral",
        "--trajectory",
        "-1,0,2",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("class=\"vertex\"").count(), 4);
    assert_eq!(svg.matches("class=\"trajectory\"").count(), 1);
    assert!(svg.contains("class=\"chopping\""));

    let analysis = json(&["analyze", "--example", "quadrilateral"]);
    for v in analysis["accessible"].as_array().unwrap() {
        assert!(svg.contains(&format!(">{}</text>", v["label"].as_str().unwrap())));
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["analyze", "--example", "quadrilateral"][..],
        &["limit", "--example", "hexagon", "--sigma", "1", "0", "-1"][..],
        &["render", "--example", "hexagon", "--trajectory", "1,0,-1"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn output_flag_writes_the_same_bytes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.json");
    let printed = run(&["analyze", "--example", "hexagon"]).stdout;
    assert!(run(&["analyze", "--example", "hexagon", "-o", out.to_str().unwrap()]).status.success());
    assert_eq!(std::fs::read(Path::new(&out)).unwrap(), printed);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    // Usage and parse errors.
    assert_eq!(code(&["analyze"]), 2);
    assert_eq!(code(&["analyze", "--example", "pentagon"]), 2);
    let bad = write_input(&dir, "bad.json", r#"{"matrix": [[1, 2]]}"#);
    assert_eq!(code(&["analyze", "--input", &bad]), 2);
    assert_eq!(code(&["flow", "--example", "hexagon", "--tau", "1", "0"]), 2);

    let asym = write_input(&dir, "asym.json", r#"{"matrix": [[1, 2], [0, 1]]}"#);
    assert_eq!(code(&["analyze", "--input", &asym]), 3);
    let repeated = write_input(&dir, "rep.json", r#"{"matrix": [[1, 0], [0, 1]]}"#);
    assert_eq!(code(&["analyze", "--input", &repeated]), 3);

    let four = write_input(
        &dir,
        "four.json",
        r#"{"matrix": [[4,0,0,0],[0,3,0,0],[0,0,2,0],[0,0,0,1]]}"#,
    );
    assert_eq!(code(&["render", "--input", &four]), 4);

    assert_eq!(code(&["invert", "--example", "hexagon", "--target", "5", "1", "1"]), 6);
}
