//! Browser bindings: simulate a chain, classify it, and evaluate the
//! leakage bound. Results cross the boundary as JSON strings.

use serde_json::json;
use wasm_bindgen::prelude::*;

use zeno_chain::analytic::lambda_bound;
use zeno_chain::chain::ChainSpec;
use zeno_chain::dynamics::{default_window, simulate_chain};
use zeno_chain::harness::classify_spec;

fn spec(n: usize, lambda_inv: f64, delta_omega: f64) -> ChainSpec {
    let spec = ChainSpec::new(n, lambda_inv);
    // NaN (or an empty input field) means no on-site shift.
    if delta_omega.is_finite() && delta_omega != 0.0 {
        spec.with_delta_omega(delta_omega)
    } else {
        spec
    }
}

/// End-site populations and leakage over one effective cycle.
pub fn simulate_json(
    n: usize,
    lambda_inv: f64,
    delta_omega: f64,
    steps: usize,
) -> Result<String, String> {
    let spec = spec(n, lambda_inv, delta_omega);
    let grid = default_window(&spec, steps).map_err(|e| e.to_string())?;
    let (trace, report) = simulate_chain(&spec, &grid).map_err(|e| e.to_string())?;
    let order = classify_spec(&spec).map_err(|e| e.to_string())?.order;
    Ok(json!({
        "t": trace.times,
        "first": trace.site_series(1),
        "last": trace.site_series(n),
        "leakage": trace.leakage,
        "mid_overlap": trace.mid_overlap,
        "delta": report.delta,
        "attained_at": report.attained_at,
        "order": order.as_str(),
    })
    .to_string())
}

pub fn classify_json(n: usize, lambda_inv: f64, delta_omega: f64) -> Result<String, String> {
    let c = classify_spec(&spec(n, lambda_inv, delta_omega)).map_err(|e| e.to_string())?;
    serde_json::to_string(&c).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn simulate(
    n: usize,
    lambda_inv: f64,
    delta_omega: f64,
    steps: usize,
) -> Result<String, JsError> {
    simulate_json(n, lambda_inv, delta_omega, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn classify(n: usize, lambda_inv: f64, delta_omega: f64) -> Result<String, JsError> {
    classify_json(n, lambda_inv, delta_omega).map_err(|e| JsError::new(&e))
}

/// Smallest `λ⁻¹` keeping the leakage of an even chain below `delta0`.
#[wasm_bindgen]
pub fn bound(n: usize, delta0: f64) -> Result<f64, JsError> {
    lambda_bound(n, delta0).map_err(|e| JsError::new(&e.to_string()))
}
