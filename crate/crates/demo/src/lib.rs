//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers and strings and answers with a JSON
//! document, either the result or `{"error": "..."}`.

use coma_core::calibration::{gauss_asymptotic_threshold, vovk_alpha_factor};
use coma_core::closure::ClosedTesting;
use coma_core::{LocalTestSpec, ScoreSet, SubsetQuery};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Outcome = Result<Value, String>;

fn respond(outcome: Outcome) -> String {
    match outcome {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

/// Numbers separated by commas, whitespace or newlines.
fn parse_scores(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| t.parse::<f64>().map_err(|_| format!("entry {}: '{t}' is not a number", i + 1)))
        .collect()
}

fn spec(r: f64, backend: &str) -> Result<LocalTestSpec, String> {
    let spec = match backend {
        "arbitrary" => LocalTestSpec::arbitrary(r),
        "gauss" => LocalTestSpec::gauss(r),
        other => return Err(format!("unknown backend '{other}'")),
    };
    spec.map_err(|e| e.to_string())
}

/// Finite values as numbers, infinities as strings.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn combine_impl(text: &str, r: f64, backend: &str, alpha: f64) -> Outcome {
    let sc = ScoreSet::new(&parse_scores(text)?).map_err(|e| e.to_string())?;
    let spec = spec(r, backend)?;
    let ct = ClosedTesting::new(&sc, &spec, alpha).map_err(|e| e.to_string())?;
    let all = SubsetQuery::all(&sc);
    let m = sc.m();
    let err = |e: coma_core::Error| e.to_string();
    Ok(json!({
        "m": m,
        "mean": num(ct.mean(&all).map_err(err)?),
        "critical_value": num(ct.threshold().critical_value(m, alpha).map_err(err)?),
        "reject": ct.local_test(&all),
        "p_local": num(ct.adjusted_p_local(&all).map_err(err)?),
    }))
}

/// Global test of all scores: mean, critical value, decision and p-value.
#[wasm_bindgen]
pub fn combine(text: &str, r: f64, backend: &str, alpha: f64) -> String {
    respond(combine_impl(text, r, backend, alpha))
}

fn threshold_curve_impl(r_min: f64, r_max: f64, steps: usize, m: usize, alpha: f64) -> Outcome {
    if r_min.is_nan() || r_max.is_nan() || r_min >= r_max || steps < 2 {
        return Err("need r_min < r_max and at least 2 steps".into());
    }
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let r = r_min + (r_max - r_min) * i as f64 / (steps - 1) as f64;
        let gauss = gauss_asymptotic_threshold(r, m, alpha).map_err(|e| e.to_string())?;
        let arbitrary = alpha / vovk_alpha_factor(r, m).map_err(|e| e.to_string())?;
        rows.push(json!({ "r": r, "gauss": gauss, "arbitrary": arbitrary, "ratio": gauss / arbitrary }));
    }
    Ok(json!({ "m": m, "alpha": alpha, "rows": rows }))
}

/// Critical values of the Gaussian and arbitrary-dependence calibrations
/// for a sweep of exponents at one size.
#[wasm_bindgen]
pub fn threshold_curve(r_min: f64, r_max: f64, steps: usize, m: usize, alpha: f64) -> String {
    respond(threshold_curve_impl(r_min, r_max, steps, m, alpha))
}

fn bounds_impl(text: &str, r: f64, backend: &str, alpha: f64, gamma: f64) -> Outcome {
    let sc = ScoreSet::new(&parse_scores(text)?).map_err(|e| e.to_string())?;
    let spec = spec(r, backend)?;
    let ct = ClosedTesting::new(&sc, &spec, alpha).map_err(|e| e.to_string())?;
    let m = sc.m();
    // the k smallest p-values for every k
    let true_discoveries: Vec<usize> = (1..=m)
        .map(|k| k - ct.fdp_bound(&SubsetQuery::smallest(k, &sc)))
        .collect();
    let fwer = ct.largest_fwer_set();
    let fdp = ct.largest_fdp_set(gamma, None).map_err(|e| e.to_string())?;
    let one_based = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    Ok(json!({
        "m": m,
        "true_discoveries": true_discoveries,
        "fwer_set": one_based(&fwer.selected),
        "fdp_set": one_based(&fdp.selected),
        "fwer_guarantee": fwer.guarantee.to_string(),
        "fdp_guarantee": fdp.guarantee.to_string(),
    }))
}

/// Lower bounds on true discoveries among the `k` smallest p-values, and
/// the automatically selected FWER and FDP sets (1-based ids).
#[wasm_bindgen]
pub fn bounds(text: &str, r: f64, backend: &str, alpha: f64, gamma: f64) -> String {
    respond(bounds_impl(text, r, backend, alpha, gamma))
}
