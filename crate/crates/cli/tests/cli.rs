use std::io::Write;
use std::process::{Command, Output, Stdio};

use combpol::classify::{ClassificationReport, QuadraticDemoReport};
use combpol::forms::FormDocument;
use combpol::{parse_poly, Field};
use serde_json::{json, Value};

const GF4_FIVE_APP: &str = "x1*x2*x3*x4*x5 + x1^2*x2^2*x3^2*x4^2";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combpol")).args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_combpol"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn temp_json(value: &Value) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{value}").unwrap();
    f
}

#[test]
fn classify_gf4_five_application_golden() {
    let out = run(&["classify", "--field", "2^2", "--dim", "5", "--n", "5", "--format", "json", GF4_FIVE_APP]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["is_n_application"], json!(true));
    assert_eq!(v["degree"], json!(8));
    assert_eq!(v["comb_degree"], json!(5));
    assert_eq!(v["semantic_check"]["status"], json!("passed"));
    assert_eq!(v["semantic_check"]["homogeneity"], json!({"mode": "exhaustive", "checked": 4096}));
    assert_eq!(v["semantic_check"]["linearity"], json!({"mode": "sampled", "checked": 1000, "seed": 0}));
    let report: ClassificationReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), v);
}

#[test]
fn classify_rejection_exits_one() {
    let out = run(&["classify", "--field", "2^2", "--n", "2", "--format", "json", "x1^3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["is_n_application"], json!(false));
    assert_eq!(v["tpl_violation"], json!([3]));
    assert_eq!(v["semantic_check"]["witness"]["property"], json!("homogeneity"));
}

#[test]
fn chains_golden() {
    let out = run(&["chains", "--p", "3", "--format", "json", "(7,4)"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["length"], json!(5));
    let chains: Vec<String> = serde_json::from_value(v["chains"].clone()).unwrap();
    assert_eq!(chains.len(), 60);
    let wanted = "(7,4)>(4,4)>(1,4)>(0,4)>(0,1)>(0,0)";
    assert!(chains.iter().any(|c| c.replace(' ', "") == wanted), "{chains:?}");
}

#[test]
fn combdeg_golden() {
    let out = run(&["combdeg", "--field", "Q", "--format", "json", "--verify", "x1^3*x2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out), json!({"comb_degree": 4, "oracle": 4}));
    let text = run(&["combdeg", "--field", "Q", "x1^3*x2"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains('4'));
}

#[test]
fn polynomial_from_stdin() {
    let out = run_stdin(&["reduce", "--field", "2^2", "--format", "json"], "x1^7 + x1^6*x2\n");
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let field: Field = "2^2".parse().unwrap();
    let got = parse_poly(v["polynomial"].as_str().unwrap(), &field, 2).unwrap();
    assert_eq!(got, parse_poly("x1 + x1^3*x2", &field, 2).unwrap());
}

#[test]
fn formal_polarization_with_verification() {
    let out = run(&["polarize", "--field", "2^2", "--n", "2", "--format", "json", "--verify", "x1^3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["verified"], json!(true));
    let defect = v["defect"].as_str().unwrap();
    assert!(defect.contains("x1_1*x2_1^2") && defect.contains("x1_1^2*x2_1"), "{defect}");
}

#[test]
fn table_polarization_and_interpolation() {
    // x1^2 over GF(3)^1
    let table = temp_json(&json!([0, 1, 1]));
    let path = table.path().to_str().unwrap();
    let out = run(&["interp", "--field", "3", "--format", "json", "--table", path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["polynomial"], json!("x1^2"));

    let out = run(&["polarize", "--field", "3", "--n", "2", "--format", "json", "--verify", "--table", path]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 9);
    // Δ²(x^2)(u, v) = 2uv
    for e in entries {
        let (u, w) = (e["args"][0][0].as_u64().unwrap(), e["args"][1][0].as_u64().unwrap());
        assert_eq!(e["value"].as_u64().unwrap(), 2 * u * w % 3, "{e}");
    }
}

#[test]
fn realize_form_file() {
    let doc = json!({"n": 2, "d": 2, "field": "2^1", "values": [
        {"idx": [1, 1], "val": 0}, {"idx": [1, 2], "val": 1}, {"idx": [2, 2], "val": 0}
    ]});
    let parsed: FormDocument = serde_json::from_value(doc.clone()).unwrap();
    parsed.to_form().unwrap();
    let file = temp_json(&doc);
    let out = run(&["realize", "--format", "json", "--verify", "--form", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["polynomial"], json!("x1*x2"));
    assert_eq!(v["verified"], json!(true));
}

#[test]
fn counterexample_golden_and_diagnostic() {
    let out = run(&["counterexample", "--field", "3^2", "--n", "9", "--format", "json", "--verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["digits"], json!([2, 5]));
    assert_eq!(v["degree"], json!(17));
    assert_eq!(v["verified"], json!(true));

    let out = run(&["counterexample", "--field", "2^2", "--n", "4", "--dim", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("n < 5") && err.lines().count() == 1, "{err}");
}

#[test]
fn demo_report_round_trips() {
    let out = run(&["demo", "--field", "3", "--dim", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let report: QuadraticDemoReport = serde_json::from_value(v.clone()).unwrap();
    assert_eq!((report.forms, report.applications, report.surjective), (27, Some(27), Some(true)));
    assert_eq!(serde_json::to_value(&report).unwrap(), v);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["classify", "--field", "4", "--n", "2", "x1"],
        vec!["classify", "--field", "3", "--n", "2", "x1^3"],
        vec!["combdeg", "--field", "3", "x1 +"],
        vec!["realize", "--form", "/nonexistent/form.json"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn json_output_is_deterministic() {
    let args = ["classify", "--field", "2^2", "--n", "5", "--seed", "42", "--format", "json", GF4_FIVE_APP];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["semantic_check"]["linearity"]["seed"], json!(42));
    let args = ["chains", "--p", "2", "--format", "json", "(3,5)"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
