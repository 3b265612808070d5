use gerbekit::models::lens::LensModel;
use serde_json::Value;
use std::process::{Command, Output};

fn gerbekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gerbekit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn reduce_hopf_nontrivial() {
    let o = gerbekit(&["reduce", "--model", "hopf", "--lambda", "r=1.5", "--xi", "standard", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let triv = report["verdicts"].as_array().unwrap().iter().find(|v| v["name"] == "triviality").unwrap();
    assert_eq!(triv["value"]["verdict"], "nontrivial");
    assert_eq!(triv["operation"], "reduction::analytic::integrality");
    assert_eq!(triv["tolerance"], 1e-3);
    assert_eq!(report["provenance"]["params"]["lambda"][0], "r=1.5");
    assert_eq!(report["provenance"]["seed"], 0);
}

#[test]
fn su2_chi_period_check() {
    let o = gerbekit(&["model-check", "--model", "su2:1", "--check", "chi-period"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"period\":0.99999"), "{}", stdout(&o));
}

#[test]
fn lens_file_cohomology() {
    let path = data("lens3.json");
    let o = gerbekit(&["cohomology", "--input", &path, "--degree", "2", "--coeff", "Z", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["verdicts"][0]["value"], "Z/3");
    let total = gerbekit(&["cohomology", "--input", &path, "--degree", "2", "--total", "--json"]);
    let report: Value = serde_json::from_slice(&total.stdout).unwrap();
    assert_eq!(report["verdicts"][0]["value"], "0");
}

#[test]
fn lens_data_file_matches_model() {
    let on_disk = std::fs::read_to_string(data("lens3.json")).unwrap();
    assert_eq!(on_disk.trim_end(), LensModel::new(3).unwrap().complex_file().to_json());
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = gerbekit(&["compare", "--model", "hopf", "--lambda", "0.25", "--lambda", "1.25", "--seed", "9", "--output", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert_eq!(a, b);
    let report: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(report["verdicts"][0]["value"]["verdict"], "stably isomorphic");
    assert_eq!(report["tool"], "gerbekit");
    assert!(report["version"].is_string());
}

#[test]
fn job_spec_round_trip_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("job.json");
    std::fs::write(&good, r#"{"command": "model-check", "model": "lens:3", "params": {"check": "cohomology"}, "seed": 1}"#).unwrap();
    let o = gerbekit(&["run", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("\"Z/3\""));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"command": "model-check", "model": "lens:3", "colour": "red"}"#).unwrap();
    assert_eq!(gerbekit(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(gerbekit(&["reduce", "--model", "torus"]).status.code(), Some(2));
    assert_eq!(gerbekit(&["model-check", "--model", "su2:1", "--check", "nope"]).status.code(), Some(2));
    assert_eq!(gerbekit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gerbekit(&["verify", "--suite", "everything"]).status.code(), Some(2));
}

#[test]
fn failing_verdict_exits_1() {
    // A tolerance far below the quadrature error turns the period check into a failure.
    let o = gerbekit(&["model-check", "--model", "hopf", "--check", "euler-period", "--level", "2", "--tolerance", "1e-12"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("gerbekit model-check"));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn indeterminate_verdict_exits_3() {
    // r = 1.005 lands between the integral and non-integral thresholds.
    let o = gerbekit(&["reduce", "--model", "hopf", "--lambda", "r=1.005"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).contains("INDETERMINATE"));
}

#[test]
fn verify_loop_suite() {
    let o = gerbekit(&["verify", "--suite", "loop", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let verdicts = report["verdicts"].as_array().unwrap();
    assert!(verdicts.len() >= 4);
    assert!(verdicts.iter().all(|v| v["status"] == "pass" && v["operation"].is_string()));
}
