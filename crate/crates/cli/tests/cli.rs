use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cggm"))
        .args(args)
        .env_remove("CGGM_TOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tmp(name: &str, contents: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn classify_triangle() {
    let out = run(&["classify", &data("triangle.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "SymmetricCer");
    assert_eq!(
        v["ordering"]["names"],
        serde_json::json!(["Blue", "Red", "Green"])
    );
}

#[test]
fn classify_circulant_reports_m2_witness() {
    let out = run(&["classify", &data("circulant6.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "Cer");
    assert!(v["m2_witness"].is_array());
}

#[test]
fn classify_negative_exit_code() {
    let out = run(&["classify", &data("cycle4.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "NotDecomposableColoring");
}

#[test]
fn input_errors_exit_one() {
    assert_eq!(
        run(&["classify", "does-not-exist.json"]).status.code(),
        Some(1)
    );
    let bad = tmp("bad.json", "{\"p\": 2, \"edges\": [[1, 3]]}");
    let out = run(&["classify", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn rcop_round_trip() {
    let out = run(&["rcop", &data("p3_rcop.json")]);
    assert_eq!(out.status.code(), Some(0));
    let g = json(&out);
    assert_eq!(g["vertex_classes"], serde_json::json!([[1, 3], [2]]));
    let path = tmp("p3_colored.json", &g.to_string());
    let c = run(&["classify", &path]);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(json(&c)["verdict"], "SymmetricCer");
}

#[test]
fn constants_of_four_by_four() {
    let out = run(&["constants", &data("four_by_four_space.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let text = v.to_string();
    assert!(text.contains("\"mu\":[2]"), "{text}");
    assert!(text.contains("\"mu\":[1,1]"), "{text}");
}

#[test]
fn normalize_petersen_and_divergence() {
    let out = run(&["normalize", &data("petersen.json"), "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out)["log_value"].as_f64().unwrap();
    // srg closed form at A = I, s = 1, f = (5, 4)
    let want = -0.5 * 20f64.ln() - 5.0 * 5f64.ln() - 4.0 * 4f64.ln()
        + (1..=5).map(|k| (k as f64).ln()).sum::<f64>()
        + (1..=4).map(|k| (k as f64).ln()).sum::<f64>();
    assert!((v - want).abs() < 1e-9, "{v} vs {want}");
    let div = run(&["normalize", &data("triangle.json"), "--s", "-2"]);
    assert_eq!(div.status.code(), Some(3));
}

#[test]
fn normalize_with_delta_and_matrix() {
    let a = tmp("d3.json", "[[2,0,0],[0,2,0],[0,0,2]]");
    let out = run(&[
        "normalize",
        &data("triangle.json"),
        "--delta",
        "3",
        "-A",
        &a,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["log_value"].is_number());
}

#[test]
fn score_ranks_models() {
    let out = run(&[
        "score",
        &data("models.json"),
        &data("sample.csv"),
        "--header",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["ranking"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let scores: Vec<f64> = rows
        .iter()
        .map(|r| r["log_score"].as_f64().unwrap())
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(v["n"], 6);
}

#[test]
fn validate_four_by_four() {
    let out = run(&[
        "validate",
        &data("four_by_four_space.json"),
        "--samples",
        "100000",
        "--seed",
        "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn validate_with_quadrature() {
    let out = run(&["validate", &data("p3_rcop.json"), "--method", "quadrature"]);
    // p3_rcop.json holds generators, not a colored graph
    assert_eq!(out.status.code(), Some(1));
    let g = json(&run(&["rcop", &data("p3_rcop.json")]));
    let path = tmp("p3_for_quad.json", &g.to_string());
    let out = run(&["validate", &path, "--method", "quadrature", "--s", "0.5"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn cholesky_coordinates() {
    let out = run(&[
        "cholesky",
        &data("four_by_four_space.json"),
        "--x",
        &data("x_pd4.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["entries"].as_array().unwrap().len(), 3);
}

#[test]
fn outputs_are_deterministic() {
    let a = run(&["constants", &data("petersen.json"), "--seed", "5"]);
    let b = run(&["constants", &data("petersen.json"), "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}
