//! Bob's radiometer test for the presence of artificial noise.
//!
//! With infinitely many channel uses Bob compares his average received power
//! against a threshold `Γ`. Under `H₀` the unknown part is `P_a|h̃_AB|²`, under
//! `H₁` it is `P_a|h̃_AB|² + P_J|h̃_MB|²`: an exponential and a two-scale
//! hypoexponential with scales `λ_A` and `λ_M`. The known powers `X₁`, `X₂` and
//! the noise floor only shift the threshold.

use serde::Serialize;

use crate::error::{checked_probability, Error, Result};
use crate::model::SystemParams;

/// Relative gap below which `λ_A` and `λ_M` are treated as equal.
pub const SCALE_TIE_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorInputs {
    /// `X₁ = P_a|ĥ_AB|²`.
    pub x1: f64,
    /// `X₂ = P_J|ĥ_MB|²`.
    pub x2: f64,
    /// `λ_A = ρ_ab P_a σ²_AB`.
    pub lambda_a: f64,
    /// `λ_M = ρ_mb P_J σ²_MB`.
    pub lambda_m: f64,
    pub sigma2_b: f64,
}

impl DetectorInputs {
    pub fn new(x1: f64, x2: f64, lambda_a: f64, lambda_m: f64, sigma2_b: f64) -> Result<Self> {
        let fields = [
            ("x1", x1),
            ("x2", x2),
            ("lambda_a", lambda_a),
            ("lambda_m", lambda_m),
            ("sigma2_b", sigma2_b),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::ParameterDomain {
                    name,
                    value,
                    reason: "detector inputs must be finite and >= 0",
                });
            }
        }
        Ok(DetectorInputs {
            x1,
            x2,
            lambda_a,
            lambda_m,
            sigma2_b,
        })
    }

    /// Inputs seen by Bob for AN power `p_j` and known powers `x1`, `x2`.
    pub fn from_params(params: &SystemParams, p_j: f64, x1: f64, x2: f64) -> Result<Self> {
        DetectorInputs::new(x1, x2, params.lambda_a(), params.lambda_m(p_j), params.sigma2_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DepBreakdown {
    pub p_fa: f64,
    pub p_md: f64,
    pub xi: f64,
}

/// `ln(1+u)/u`, continuous through `u = 0`.
pub(crate) fn log1p_ratio(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u / 2.0 + u * u / 3.0
    } else {
        u.ln_1p() / u
    }
}

/// `(1-e^{-y})/y`, continuous through `y = 0`.
fn expm1_ratio(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        1.0 - y / 2.0 + y * y / 6.0
    } else {
        -(-y).exp_m1() / y
    }
}

/// `P(E_a + E_b > t)` for independent exponentials with means `a` and `b`.
///
/// Written as `e^{-t/hi}(1 + (t/hi)·(1-e^{-tΔ})/(tΔ))` with `Δ = 1/lo - 1/hi`, which
/// equals `(a e^{-t/a} - b e^{-t/b})/(a-b)` without the cancellation near `a = b`
/// and reduces to the Erlang(2) tail at `a = b`.
pub fn hypoexp_survival(t: f64, a: f64, b: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == 0.0 {
        return 0.0;
    }
    if lo == 0.0 {
        return (-t / hi).exp();
    }
    let base = (-t / hi).exp();
    if hi - lo < SCALE_TIE_REL * hi {
        return base * (1.0 + t / hi);
    }
    let rate_gap = 1.0 / lo - 1.0 / hi;
    base * (1.0 + (t / hi) * expm1_ratio(t * rate_gap))
}

/// False-alarm, missed-detection and total error probability at threshold `gamma`.
pub fn dep_components(inputs: &DetectorInputs, gamma: f64) -> Result<DepBreakdown> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::ParameterDomain {
            name: "gamma",
            value: gamma,
            reason: "threshold must be finite and >= 0",
        });
    }
    let floor_h0 = inputs.x1 + inputs.sigma2_b;
    let excess_h0 = gamma - floor_h0;
    let p_fa = if inputs.lambda_a == 0.0 {
        // H0 power is known exactly
        if gamma >= floor_h0 {
            0.0
        } else {
            1.0
        }
    } else if excess_h0 <= 0.0 {
        1.0
    } else {
        (-excess_h0 / inputs.lambda_a).exp()
    };
    let floor_h1 = floor_h0 + inputs.x2;
    let excess_h1 = gamma - floor_h1;
    let p_md = if gamma <= floor_h1 {
        0.0
    } else {
        1.0 - hypoexp_survival(excess_h1, inputs.lambda_a, inputs.lambda_m)
    };
    let p_fa = checked_probability("false alarm probability", p_fa)?;
    let p_md = checked_probability("missed detection probability", p_md)?;
    Ok(DepBreakdown {
        p_fa,
        p_md,
        xi: p_fa + p_md,
    })
}

/// Offset `k₁` of the optimal threshold above `X₁ + X₂ + σ²_b`.
///
/// `k₁ = λ_Aλ_M/(λ_M-λ_A) · ln(1 - (1 - λ_M/λ_A) e^{-X₂/λ_A})`, evaluated as
/// `λ_M w · ln(1+u)/u` with `w = e^{-X₂/λ_A}`, `u = (λ_M-λ_A)w/λ_A`. At `λ_A = λ_M`
/// this is the limit `λ e^{-X₂/λ}`.
fn threshold_offset(x2: f64, lambda_a: f64, lambda_m: f64) -> Result<f64> {
    if lambda_m == 0.0 {
        return Ok(0.0);
    }
    let w = (-x2 / lambda_a).exp();
    if (lambda_a - lambda_m).abs() < SCALE_TIE_REL * lambda_a.max(lambda_m) {
        return Ok(lambda_a * w);
    }
    let u = (lambda_m - lambda_a) / lambda_a * w;
    // u > -1 always for lambda_m > 0; this guards the log argument
    if !(1.0 + u > 0.0) {
        return Err(Error::NumericDomain(format!(
            "threshold offset log argument {} <= 0",
            1.0 + u
        )));
    }
    Ok(lambda_m * w * log1p_ratio(u))
}

/// Bob's optimal threshold `Γ* = X₁ + X₂ + k₁ + σ²_b`.
///
/// With `λ_A = 0` Bob knows the `H₀` power exactly and sets `Γ* = X₁ + σ²_b`.
pub fn optimal_threshold(inputs: &DetectorInputs) -> Result<f64> {
    if inputs.lambda_a == 0.0 {
        return Ok(inputs.x1 + inputs.sigma2_b);
    }
    let k1 = threshold_offset(inputs.x2, inputs.lambda_a, inputs.lambda_m)?;
    Ok(inputs.x1 + inputs.x2 + k1 + inputs.sigma2_b)
}

/// Minimum detection error probability `ξ*` at `Γ*`.
///
/// `ξ* = 1 + e^{-(X₂+k₁)/λ_A} - S(k₁)` where `S` is the hypoexponential tail.
pub fn min_dep(inputs: &DetectorInputs) -> Result<f64> {
    let lambda_a = inputs.lambda_a;
    if lambda_a == 0.0 {
        // perfect suspicious-link knowledge: any AN at all is detected
        let silent = inputs.x2 == 0.0 && inputs.lambda_m == 0.0;
        return Ok(if silent { 1.0 } else { 0.0 });
    }
    let k1 = threshold_offset(inputs.x2, lambda_a, inputs.lambda_m)?;
    let raw = 1.0 + (-(inputs.x2 + k1) / lambda_a).exp() - hypoexp_survival(k1, lambda_a, inputs.lambda_m);
    checked_probability("minimum detection error probability", raw)
}

/// Threshold and minimum DEP when the whole suspicious link is unknown to Bob
/// (`ρ_ab = 1`, so `X₁ = 0`), for AN power `p_j` and known jamming power `x2`.
///
/// `ρ_mb = 1` uses `k₃` (no known jamming part, `x2` ignored); `ρ_mb = 0` makes the
/// jamming power fully known and `Γ* = X₂ + σ²_b`, `ξ* = e^{-X₂/(P_aσ²_AB)}`.
pub fn min_dep_case3(params: &SystemParams, p_j: f64, x2: f64) -> Result<(f64, f64)> {
    params.validate()?;
    SystemParams::check_power(p_j)?;
    if params.rho_ab != 1.0 {
        return Err(Error::ParameterDomain {
            name: "rho_ab",
            value: params.rho_ab,
            reason: "the fully-unknown suspicious-link case needs rho_ab = 1",
        });
    }
    let a = params.p_a * params.sigma2_ab;
    let m = params.rho_mb * p_j * params.sigma2_mb;
    let sigma2_b = params.sigma2_b;
    let tail = |k: f64| -> f64 {
        if (a - m).abs() < SCALE_TIE_REL * a.max(m) {
            (1.0 + k / a) * (-k / a).exp()
        } else {
            (a * (-k / a).exp() - m * (-k / m).exp()) / (a - m)
        }
    };

    if params.rho_mb == 1.0 || m == 0.0 && params.rho_mb != 0.0 {
        if m == 0.0 {
            return Ok((sigma2_b, 1.0));
        }
        let k3 = if (a - m).abs() < SCALE_TIE_REL * a.max(m) {
            a
        } else {
            m * a / (m - a) * (m / a).ln()
        };
        let xi = (-k3 / a).exp() + 1.0 - tail(k3);
        return Ok((k3 + sigma2_b, checked_probability("minimum DEP (k3)", xi)?));
    }
    if params.rho_mb == 0.0 {
        let xi = (-x2 / a).exp();
        return Ok((x2 + sigma2_b, checked_probability("minimum DEP (known jamming)", xi)?));
    }
    let k2 = if (a - m).abs() < SCALE_TIE_REL * a.max(m) {
        a * (-x2 / a).exp()
    } else {
        let arg = 1.0 - (1.0 - m / a) * (-x2 / a).exp();
        if !(arg > 0.0) {
            return Err(Error::NumericDomain(format!("k2 log argument {arg} <= 0")));
        }
        m * a / (m - a) * arg.ln()
    };
    let xi = 1.0 + (-(x2 + k2) / a).exp() - tail(k2);
    Ok((x2 + sigma2_b + k2, checked_probability("minimum DEP (k2)", xi)?))
}
