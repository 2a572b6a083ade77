//! End-to-end tests of the `courant` binary: exit codes, JSON report shape,
//! and byte determinism, driven against the shipped corpus.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_courant"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON: {e}\n{}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn validate_passes_on_a_round_model() {
    let out = run(&["validate", &corpus("su2_cartan.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["data"]["base_dim"], 3);
    assert_eq!(v["data"]["metric_positive_definite"], true);
}

#[test]
fn validate_rejects_broken_structure_constants() {
    let out = run(&["validate", &corpus("bad_jacobi.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    assert!(v["checks"][0]["detail"].as_str().unwrap().contains("Jacobi"));
}

#[test]
fn validate_flags_a_non_closed_curving_form() {
    let out = run(&["validate", &corpus("su2_plus_r_fbad.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["courant_axioms"]);
}

#[test]
fn unparseable_input_exits_with_the_usage_code() {
    let mut tmp = tempfile::NamedTempFile::new().unwrap();
    writeln!(tmp, "this is not json").unwrap();
    let out = run(&["validate", &tmp.path().display().to_string()]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["status"], "error");

    let out = run(&["validate", "/no/such/file.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn curvature_of_the_canonical_point_is_flat() {
    let out = run(&["curvature", &corpus("su2_cartan.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["data"]["levi_civita"], true);
    assert_eq!(v["data"]["flat"], true);
    assert_eq!(v["data"]["witness"], Value::Null);
}

#[test]
fn doubled_cartan_form_reports_a_witness() {
    let out = run(&["curvature", &corpus("su2_h2.json")]);
    assert_eq!(code(&out), 0, "non-flatness is a result, not a failure");
    let v = json(&out);
    assert_eq!(v["data"]["flat"], false);
    assert_eq!(v["data"]["witness"]["block"], "(X+,Y-)Z+");
    assert_eq!(v["data"]["witness"]["index"], serde_json::json!([1, 2, 1, 2]));
    assert_eq!(v["data"]["witness"]["value"], "3/4");
}

#[test]
fn explicit_connection_tensors_override_the_family() {
    let mut tmp = tempfile::NamedTempFile::new().unwrap();
    write!(
        tmp,
        r#"{{
  "b_plus": {{
    "1,2,3": "-1/3", "1,3,2": "1/3", "2,1,3": "1/3",
    "2,3,1": "-1/3", "3,1,2": "-1/3", "3,2,1": "1/3"
  }},
  "b_minus": {{
    "1,2,3": "1/3", "1,3,2": "-1/3", "2,1,3": "-1/3",
    "2,3,1": "1/3", "3,1,2": "1/3", "3,2,1": "-1/3"
  }}
}}"#
    )
    .unwrap();
    let out = run(&[
        "curvature",
        &corpus("su2_cartan.json"),
        "--tensors",
        &tmp.path().display().to_string(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["data"]["connection"], "explicit tensors");
    assert_eq!(v["data"]["levi_civita"], true);
    assert_eq!(v["data"]["flat"], true);
}

#[test]
fn negative_rational_flags_parse() {
    let out = run(&[
        "curvature",
        &corpus("su2_cartan.json"),
        "--lambda-plus",
        "-2/3",
        "--mu",
        "5/3",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["data"]["connection"]["lambda_plus"], "-2/3");
    assert_eq!(v["data"]["connection"]["mu"], "5/3");
}

#[test]
fn verify_suite_passes_on_a_fiber_model() {
    let out = run(&["verify", &corpus("su2_cartan_fiber.json"), "--trials", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
}

#[test]
fn lc_space_reports_the_known_dimensions() {
    let out = run(&["lc-space", &corpus("su2_cartan.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["data"]["mode"], "bi_invariant");
    assert_eq!(v["data"]["plus_dim"], 0);
    assert_eq!(v["data"]["minus_dim"], 8);
    assert_eq!(v["data"]["flat_dim"], 8);
    assert_eq!(v["data"]["lc_dim"], 16);
    assert_eq!(v["data"]["base_point"]["b_plus"]["1,2,3"], "-1/3");
}

#[test]
fn lc_space_rejects_models_with_a_curving_form() {
    let out = run(&["lc-space", &corpus("su2_twisted.json")]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["status"], "fail");
}

#[test]
fn sequence_reports_exact_ranks() {
    let out = run(&["sequence", &corpus("su2_cartan.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["data"]["dims"], serde_json::json!([10, 18, 9, 1]));
    assert_eq!(v["data"]["exact"], serde_json::json!([true, true, true, true]));
    assert_eq!(v["data"]["invariant_asserted"], true);
    assert_eq!(v["data"]["invariant_dims"], serde_json::json!([0, 0, 1, 1]));
    assert_eq!(v["data"]["euler_characteristic"], 0);
}

#[test]
fn ce_betti_of_su2_is_the_three_sphere_answer() {
    let out = run(&["ce", &corpus("su2_cartan.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["data"]["betti"], serde_json::json!([1, 0, 0, 1]));
}

#[test]
fn ce_max_degree_out_of_range_is_a_usage_error() {
    let out = run(&["ce", &corpus("su2_cartan.json"), "--max-degree", "9"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn consequences_pass_at_the_canonical_point() {
    let out = run(&["consequences", &corpus("su2_cartan.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["data"]["riemannian"], true);
}

#[test]
fn consequences_fail_when_the_family_is_not_flat() {
    let out = run(&["consequences", &corpus("su2_h2.json")]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    let flat = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "flat")
        .unwrap();
    assert_eq!(flat["pass"], false);
}

#[test]
fn reports_are_byte_deterministic() {
    let a = run(&["verify", &corpus("su2_cartan.json"), "--trials", "4", "--seed", "7"]);
    let b = run(&["verify", &corpus("su2_cartan.json"), "--trials", "4", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn text_format_is_plain_lines_not_json() {
    let out = run(&["sequence", &corpus("su2_cartan.json"), "--format", "text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("courant sequence"));
    assert!(text.trim_end().ends_with("status: pass"));
    assert!(serde_json::from_str::<Value>(&text).is_err());
}
