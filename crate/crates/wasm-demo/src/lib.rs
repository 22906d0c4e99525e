//! Browser bindings for the static demo page in `www/`.
//!
//! Every export takes and returns JSON text, so the page needs no generated
//! TypeScript types. The `*_json` functions do the work and are plain Rust,
//! so they are tested natively.

use covert_watch_core::optimizer::{algorithm1_with_budget, ConstraintActive};
use covert_watch_core::{
    avg_min_dep, covert_power, dep_components, ex_quadrature, optimal_threshold, min_dep, DetectorInputs, ExEvaluator,
    SystemParams,
};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 2000;

fn bad(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn check_points(points: usize) -> Result<usize, String> {
    if (2..=MAX_POINTS).contains(&points) {
        Ok(points)
    } else {
        Err(format!("points must be in 2..={MAX_POINTS}, got {points}"))
    }
}

#[derive(Deserialize)]
struct ThresholdRequest {
    inputs: DetectorInputsJson,
    points: usize,
}

#[derive(Deserialize)]
struct DetectorInputsJson {
    x1: f64,
    x2: f64,
    lambda_a: f64,
    lambda_m: f64,
    sigma2_b: f64,
}

#[derive(Serialize)]
struct ThresholdCurve {
    gamma: Vec<f64>,
    p_fa: Vec<f64>,
    p_md: Vec<f64>,
    xi: Vec<f64>,
    gamma_star: f64,
    xi_star: f64,
}

/// False-alarm, missed-detection and total error along Bob's threshold.
pub fn threshold_curve_json(request: &str) -> Result<String, String> {
    let req: ThresholdRequest = serde_json::from_str(request).map_err(bad)?;
    let n = check_points(req.points)?;
    let i = req.inputs;
    let inputs = DetectorInputs::new(i.x1, i.x2, i.lambda_a, i.lambda_m, i.sigma2_b).map_err(bad)?;
    let gamma_star = optimal_threshold(&inputs).map_err(bad)?;
    let hi = (2.0 * gamma_star).max(inputs.x1 + inputs.x2 + inputs.sigma2_b + 5.0 * (inputs.lambda_a + inputs.lambda_m));
    let mut curve = ThresholdCurve {
        gamma: Vec::with_capacity(n),
        p_fa: Vec::with_capacity(n),
        p_md: Vec::with_capacity(n),
        xi: Vec::with_capacity(n),
        gamma_star,
        xi_star: min_dep(&inputs).map_err(bad)?,
    };
    for k in 0..n {
        let g = hi * k as f64 / (n - 1) as f64;
        let d = dep_components(&inputs, g).map_err(bad)?;
        curve.gamma.push(g);
        curve.p_fa.push(d.p_fa);
        curve.p_md.push(d.p_md);
        curve.xi.push(d.xi);
    }
    serde_json::to_string(&curve).map_err(bad)
}

#[derive(Deserialize)]
struct PowerRequest {
    params: SystemParams,
    points: usize,
}

#[derive(Serialize)]
struct CovertCurve {
    p_j: Vec<f64>,
    xi_bar: Vec<f64>,
    /// Largest covert AN power, `null` when every power up to `p_j_max` is covert.
    p_j_covert: Option<f64>,
    p_j_allowed_max: f64,
    floor: f64,
}

fn power_axis(params: &SystemParams, n: usize) -> Vec<f64> {
    (0..n).map(|k| params.p_j_max * k as f64 / (n - 1) as f64).collect()
}

/// Averaged minimum DEP against AN power, with the covert budget.
pub fn covert_curve_json(request: &str) -> Result<String, String> {
    let req: PowerRequest = serde_json::from_str(request).map_err(bad)?;
    let n = check_points(req.points)?;
    let params = req.params;
    params.validate().map_err(bad)?;
    let budget = covert_power(&params).map_err(bad)?;
    let p_j = power_axis(&params, n);
    let xi_bar = p_j.iter().map(|&p| avg_min_dep(&params, p)).collect::<Result<_, _>>().map_err(bad)?;
    let p_j_covert = match budget.p_j_covert {
        covert_watch_core::PowerBound::Finite(v) => Some(v),
        covert_watch_core::PowerBound::Unconstrained => None,
    };
    let curve = CovertCurve {
        p_j,
        xi_bar,
        p_j_covert,
        p_j_allowed_max: budget.p_j_allowed_max,
        floor: 1.0 - params.delta,
    };
    serde_json::to_string(&curve).map_err(bad)
}

#[derive(Serialize)]
struct SchemeCurve {
    p_j: Vec<f64>,
    e_x: Vec<f64>,
    passive: f64,
    constant_covert: f64,
    optimal: f64,
    p_j_star: f64,
    p_j_allowed_max: f64,
    regime: &'static str,
}

/// `E[X]` against AN power inside the covert budget, and the three schemes.
pub fn schemes_json(request: &str) -> Result<String, String> {
    let req: PowerRequest = serde_json::from_str(request).map_err(bad)?;
    let n = check_points(req.points)?;
    let params = req.params;
    params.validate().map_err(bad)?;
    let budget = covert_power(&params).map_err(bad)?;
    let cap = budget.p_j_allowed_max;
    let p_j: Vec<f64> = (0..n).map(|k| cap * k as f64 / (n - 1) as f64).collect();
    let e_x = p_j
        .iter()
        .map(|&p| ex_quadrature(&params, p).map(|o| o.value))
        .collect::<Result<_, _>>()
        .map_err(bad)?;
    let best = algorithm1_with_budget(&params, &budget, None, ExEvaluator::Quadrature).map_err(bad)?;
    let curve = SchemeCurve {
        p_j,
        e_x,
        passive: ex_quadrature(&params, 0.0).map_err(bad)?.value,
        constant_covert: ex_quadrature(&params, cap).map_err(bad)?.value,
        optimal: best.ex_star,
        p_j_star: best.p_j_star,
        p_j_allowed_max: cap,
        regime: match best.constraint_active {
            ConstraintActive::PowerCap => "power cap",
            ConstraintActive::CovertCap => "covert cap",
            ConstraintActive::Interior => "interior",
            ConstraintActive::Silent => "silent",
        },
    };
    serde_json::to_string(&curve).map_err(bad)
}

#[wasm_bindgen]
pub fn threshold_curve(request: &str) -> Result<String, JsError> {
    threshold_curve_json(request).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn covert_curve(request: &str) -> Result<String, JsError> {
    covert_curve_json(request).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn schemes(request: &str) -> Result<String, JsError> {
    schemes_json(request).map_err(|e| JsError::new(&e))
}
