//! Browser bindings: each function runs one gerbekit job and returns its JSON report.

use gerbekit::cli::{run, JobSpec};
use wasm_bindgen::prelude::*;

fn run_json(spec: &str) -> String {
    match JobSpec::parse(spec).and_then(|job| run(&job)) {
        Ok(report) => report.to_json(),
        Err(e) => format!("{{\"error\": {:?}}}", e.to_string()),
    }
}

/// Reduce the trivial gerbe on `S³` along the Hopf fibration with `λ = r`.
#[wasm_bindgen]
pub fn hopf_reduce(r: f64, level: u32) -> String {
    run_json(&format!(
        r#"{{"command": "reduce", "model": "hopf", "params": {{"lambda": ["r={r:?}"], "level": {}}}}}"#,
        level.min(6)
    ))
}

/// `∫_{SU(2)} χ` at level `k`.
#[wasm_bindgen]
pub fn su2_chi_period(k: i32) -> String {
    run_json(&format!(r#"{{"command": "model-check", "model": "su2:{k}", "params": {{"check": "chi-period"}}}}"#))
}

/// `H^degree(L(n, 1); ℤ)` from the simplicial model.
#[wasm_bindgen]
pub fn lens_cohomology(n: u32, degree: u32) -> String {
    run_json(&format!(r#"{{"command": "cohomology", "model": "lens:{}", "params": {{"degree": {degree}}}}}"#, n.clamp(2, 12)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn verdict(report: &str, name: &str) -> Value {
        let v: Value = serde_json::from_str(report).unwrap();
        v["verdicts"].as_array().unwrap().iter().find(|l| l["name"] == name).unwrap()["value"].clone()
    }

    #[test]
    fn hopf_half_is_nontrivial() {
        assert_eq!(verdict(&hopf_reduce(0.5, 3), "triviality")["verdict"], "nontrivial");
        assert_eq!(verdict(&hopf_reduce(2.0, 3), "triviality")["verdict"], "trivial");
    }

    #[test]
    fn chi_period_is_level() {
        let p = verdict(&su2_chi_period(2), "∫χ = k")["period"].as_f64().unwrap();
        assert!((p - 2.0).abs() < 1e-3);
    }

    #[test]
    fn lens_cohomology_groups() {
        assert_eq!(verdict(&lens_cohomology(3, 2), "H^2(L(3,1); Z)"), "Z/3");
        assert_eq!(verdict(&lens_cohomology(4, 3), "H^3(L(4,1); Z)"), "Z");
    }

    #[test]
    fn errors_are_reported_as_json() {
        let v: Value = serde_json::from_str(&run_json("{\"command\": \"reduce\"}")).unwrap();
        assert!(v["error"].as_str().unwrap().contains("--model"));
    }
}
