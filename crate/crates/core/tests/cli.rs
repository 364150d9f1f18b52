use std::path::Path;
use std::process::{Command, Output};

fn polymap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polymap")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn help_for_every_command() {
    for cmd in ["analyze", "diagram", "bands", "classify"] {
        let o = polymap(&[cmd, "--help"]);
        assert!(o.status.success(), "{cmd} --help");
        assert!(stdout(&o).contains("Usage"));
    }
}

#[test]
fn analyze_reports_json() {
    let o = polymap(&["analyze", "--preset", "logistic", "--lambda", "3.2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let fps = v["fixed_points"].as_array().unwrap();
    assert_eq!(fps.len(), 2);
    assert!(v["conjugacy_max_error"].as_f64().unwrap() < 1e-8);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(polymap(&["analyze", "--coeffs", "1,1,1"]).status.code(), Some(2));
    assert_eq!(polymap(&["diagram", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(polymap(&["bands", "--degree", "4"]).status.code(), Some(2));
    assert_eq!(polymap(&["frobnicate"]).status.code(), Some(2));
    let o = polymap(&["analyze", "--preset", "logistic", "--lambda", "9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain");
    std::fs::write(&file, "x").unwrap();
    let out = file.join("sub");
    let o = polymap(&["diagram", "--preset", "logistic", "--grid", "2.8:3.6:10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn numerical_failure_exits_4() {
    let o = polymap(&["bands", "--degree", "2", "--compute", "3", "--bisect-tol", "1e-20"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn bands_table_and_compute() {
    let o = polymap(&["bands", "--degree", "2"]);
    let text = stdout(&o);
    assert!(text.contains("b_2 = 2.449489742783178 (exact: sqrt(6))"));
    assert!(text.contains("b_inf"));
    let o = polymap(&["bands", "--degree", "3"]);
    assert!(stdout(&o).starts_with("c_"));
    let o = polymap(&["bands", "--degree", "2", "--compute", "4"]);
    assert!(o.status.success());
    let line = stdout(&o).lines().find(|l| l.starts_with("b_4")).unwrap().to_string();
    let v: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((v - 2.5644).abs() < 7e-4);
}

#[test]
fn classify_prints_label_then_profile() {
    let o = polymap(&["classify", "--preset", "cqm_quadratic", "--grid", "0:3:301"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("regular-reversal"));
    assert_eq!(lines.next(), Some("lambda,region,near_boundary,beyond_table"));
    assert_eq!(lines.count(), 301);
}

fn run_diagram(out: &Path) {
    let o = polymap(&[
        "diagram", "--preset", "logistic", "--grid", "2.8:3.6:80", "--svg", "--deterministic", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("period 1 -> 2"));
}

#[test]
fn deterministic_diagram_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_diagram(a.path());
    run_diagram(b.path());
    for f in ["diagram.csv", "diagram.json", "diagram.svg"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f} differs between runs");
    }
    let csv = std::fs::read_to_string(a.path().join("diagram.csv")).unwrap();
    assert!(csv.starts_with("lambda,seed_index,x\n"));
}

#[test]
fn family_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("fam.json");
    std::fs::write(&spec, r#"{"degree": 2, "s": 1, "fixed_points": ["lambda"], "domain": [0, 4]}"#).unwrap();
    let o = polymap(&["analyze", "--family", spec.to_str().unwrap(), "--lambda", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let missing = dir.path().join("missing.json");
    let o = polymap(&["analyze", "--family", missing.to_str().unwrap(), "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn coefficient_family_reports_original_map() {
    let o = polymap(&["analyze", "--preset", "bmap", "--b", "2", "--lambda", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // f(y) = y^2 - 2y
    assert_eq!(v["general"], serde_json::json!([0.0, -2.0, 1.0]));
    assert_eq!(v["canonical"]["s"], -1);
    assert_eq!(v["canonical"]["fixed_points"][1], -3.0);
    assert!(v["conjugacy_max_error"].as_f64().unwrap() < 1e-12);
}
