//! Averaged minimum DEP and the covert AN power budget.
//!
//! The monitor does not know the known-to-Bob jamming power `X₂ = P_J|ĥ_MB|²`
//! either, so covertness is judged on `ξ̄* = E_{X₂}[ξ*]` with
//! `X₂ ~ Exp((1-ρ_mb)P_Jσ²_MB)`. `ξ̄*` falls strictly with `P_J`, which makes the
//! budget `P_J^covert` a one-dimensional root.

use serde::Serialize;

use crate::detector::{hypoexp_survival, min_dep, DetectorInputs, SCALE_TIE_REL};
use crate::error::{checked_probability, Error, Result};
use crate::model::{ChannelDraw, SystemParams};
use crate::quad::{integrate, integrate_half_line, Tolerance};
use crate::stream::{McEstimate, Moments, Substreams};

/// Relative bisection tolerance on the power.
pub const BISECTION_REL_POWER: f64 = 1e-9;
/// Absolute bisection tolerance on `ξ̄*`.
pub const BISECTION_ABS_DEP: f64 = 1e-8;

fn averaging_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-10,
        rel: 1e-12,
        max_intervals: 2000,
    }
}

/// `ξ̄*(P_J)` by direct quadrature of `ξ*(x)·f_{X₂}(x)` over the half-line.
pub fn avg_min_dep(params: &SystemParams, p_j: f64) -> Result<f64> {
    params.validate()?;
    SystemParams::check_power(p_j)?;
    if p_j == 0.0 {
        return Ok(1.0);
    }
    let lambda_a = params.lambda_a();
    if lambda_a == 0.0 {
        return Ok(0.0);
    }
    let lambda_m = params.lambda_m(p_j);
    let mu = params.known_jamming_mean(p_j);
    let at = |x2: f64| min_dep(&DetectorInputs::new(0.0, x2, lambda_a, lambda_m, params.sigma2_b)?);
    if mu == 0.0 {
        return at(0.0);
    }

    let mut failure = None;
    let scale = mu * lambda_a / (mu + lambda_a);
    let est = integrate_half_line(
        |x| {
            let density = (-x / mu).exp() / mu;
            if density == 0.0 {
                return 0.0;
            }
            match at(x) {
                Ok(v) => v * density,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        scale,
        averaging_tolerance(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    checked_probability("averaged minimum DEP", est?.value)
}

/// `ξ̄*(P_J)` from the closed and reduced forms.
///
/// - `ρ_mb = 0`: `λ_A/(λ_A + P_Jσ²_MB)`; with `ρ_ab = 1` this is `1/(1 + P_Jσ²_MB/(P_aσ²_AB))`.
/// - `ρ_mb = 1`: `X₂ ≡ 0` and `ξ̄* = 1 + e^{-k/λ_A} - S(k)` with
///   `k = λ_Aλ_M ln(λ_M/λ_A)/(λ_M-λ_A)`.
/// - otherwise, for `r = λ_M/λ_A < 1`, the reduced single integral
///   `1 - ∫₀¹ (1 - (1-r) s^{1/a})^{1/(1-r)} ds` with `a = λ_A/E[X₂]`.
///
/// Outside these regimes the result is a [`Error::ClosedFormDomain`].
pub fn avg_min_dep_closed(params: &SystemParams, p_j: f64) -> Result<f64> {
    params.validate()?;
    SystemParams::check_power(p_j)?;
    if p_j == 0.0 {
        return Ok(1.0);
    }
    let lambda_a = params.lambda_a();
    if lambda_a == 0.0 {
        return Ok(0.0);
    }
    let lambda_m = params.lambda_m(p_j);

    if params.rho_mb == 0.0 {
        let xi = lambda_a / (lambda_a + p_j * params.sigma2_mb);
        return checked_probability("averaged minimum DEP (known jamming)", xi);
    }
    if params.rho_mb == 1.0 {
        let k = if (lambda_a - lambda_m).abs() < SCALE_TIE_REL * lambda_a.max(lambda_m) {
            lambda_a
        } else {
            lambda_a * lambda_m * (lambda_m / lambda_a).ln() / (lambda_m - lambda_a)
        };
        let xi = 1.0 + (-k / lambda_a).exp() - hypoexp_survival(k, lambda_a, lambda_m);
        return checked_probability("averaged minimum DEP (unknown jamming)", xi);
    }

    let r = lambda_m / lambda_a;
    if r >= 1.0 {
        return Err(Error::ClosedFormDomain(
            "reduced form needs rho_mb P_J sigma2_mb < rho_ab P_a sigma2_ab",
        ));
    }
    let a = lambda_a / params.known_jamming_mean(p_j);
    let exponent = 1.0 / (1.0 - r);
    let est = integrate(
        |s: f64| (1.0 - (1.0 - r) * s.powf(1.0 / a)).powf(exponent),
        0.0,
        1.0,
        averaging_tolerance(),
    )?;
    checked_probability("averaged minimum DEP (reduced form)", 1.0 - est.value)
}

/// Monte-Carlo `ξ̄*`: draws channels and averages `ξ*` at the realized `X₂`.
pub fn avg_min_dep_monte_carlo(params: &SystemParams, p_j: f64, n: usize, streams: &Substreams) -> Result<McEstimate> {
    params.validate()?;
    SystemParams::check_power(p_j)?;
    if n == 0 {
        return Err(Error::ParameterDomain {
            name: "n",
            value: 0.0,
            reason: "at least one draw is required",
        });
    }
    let lambda_a = params.lambda_a();
    let lambda_m = params.lambda_m(p_j);
    let parts = streams.map_chunks(n, |rng, len| -> Result<Moments> {
        let mut m = Moments::default();
        for _ in 0..len {
            let draw = ChannelDraw::sample(params, rng);
            let inputs = DetectorInputs::new(draw.x1(params), draw.x2(p_j), lambda_a, lambda_m, params.sigma2_b)?;
            m.push(min_dep(&inputs)?);
        }
        Ok(m)
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Moments::merge(&parts).estimate())
}

/// `P_J^covert`, either a finite root or unbounded within the power limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PowerBound {
    Finite(f64),
    /// `ξ̄*(P_J^max) ≥ 1-δ`: the covert constraint never binds below the power limit.
    Unconstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovertBudget {
    pub p_j_covert: PowerBound,
    /// `min(P_J^max, P_J^covert)`.
    pub p_j_allowed_max: f64,
}

impl CovertBudget {
    /// True when the covert constraint, not the power limit, sets the cap.
    pub fn covert_binding(&self, p_j_max: f64) -> bool {
        matches!(self.p_j_covert, PowerBound::Finite(p) if p < p_j_max)
    }
}

/// Inverts `ξ̄*(P_J) = 1-δ` on `[0, P_J^max]` by bisection.
///
/// The returned finite root is always on the feasible side: `ξ̄*(P_J^covert) ≥ 1-δ`
/// up to the bisection tolerance.
pub fn covert_power(params: &SystemParams) -> Result<CovertBudget> {
    params.validate()?;
    let target = 1.0 - params.delta;
    let finite = |p: f64| CovertBudget {
        p_j_covert: PowerBound::Finite(p),
        p_j_allowed_max: p.min(params.p_j_max),
    };
    if params.delta == 0.0 {
        return Ok(finite(0.0));
    }
    if avg_min_dep(params, params.p_j_max)? >= target {
        return Ok(CovertBudget {
            p_j_covert: PowerBound::Unconstrained,
            p_j_allowed_max: params.p_j_max,
        });
    }
    if params.rho_ab == 0.0 {
        // any AN at all is detected
        return Ok(finite(0.0));
    }

    let (mut lo, mut hi) = (0.0, params.p_j_max);
    while hi - lo > BISECTION_REL_POWER * hi {
        let mid = 0.5 * (lo + hi);
        let xi = avg_min_dep(params, mid)?;
        if xi >= target {
            lo = mid;
            if xi - target <= BISECTION_ABS_DEP {
                break;
            }
        } else {
            hi = mid;
        }
    }
    Ok(finite(lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(rho_ab: f64, rho_mb: f64, pa_ab: f64, delta: f64) -> SystemParams {
        SystemParams {
            p_a: pa_ab,
            sigma2_ab: 1.0,
            rho_ab,
            rho_mb,
            delta,
            ..SystemParams::default()
        }
    }

    #[test]
    fn no_an_is_never_detected() {
        assert_eq!(avg_min_dep(&SystemParams::default(), 0.0).unwrap(), 1.0);
        assert_eq!(avg_min_dep_closed(&SystemParams::default(), 0.0).unwrap(), 1.0);
    }

    #[test]
    fn known_jamming_equal_scales_is_one_half() {
        // λ_A = 0.5·10 = 5 = P_J σ²_MB
        let p = params(0.5, 0.0, 10.0, 0.5);
        assert!((avg_min_dep(&p, 5.0).unwrap() - 0.5).abs() < 1e-9);
        assert!((avg_min_dep_closed(&p, 5.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fully_unknown_links_closed_form() {
        let p = params(1.0, 0.0, 1.0, 0.5);
        assert!((avg_min_dep_closed(&p, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let p = params(1.0, 1.0, 1.0, 0.5);
        let closed = avg_min_dep_closed(&p, 2.0).unwrap();
        assert!((closed - avg_min_dep(&p, 2.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn reduced_form_matches_direct_expectation() {
        for &(rho_ab, rho_mb, pa, pj) in &[(0.5, 0.5, 10.0, 5.0), (0.9, 0.2, 3.0, 8.0), (0.3, 0.7, 100.0, 2.0)] {
            let p = params(rho_ab, rho_mb, pa, 0.5);
            let direct = avg_min_dep(&p, pj).unwrap();
            let reduced = avg_min_dep_closed(&p, pj).unwrap();
            assert!((direct - reduced).abs() < 1e-8, "{direct} vs {reduced}");
        }
    }

    #[test]
    fn reduced_form_refuses_large_jamming_uncertainty() {
        let p = params(0.1, 0.9, 1.0, 0.5);
        assert!(matches!(avg_min_dep_closed(&p, 5.0), Err(Error::ClosedFormDomain(_))));
    }

    #[test]
    fn perfect_suspicious_knowledge() {
        let p = params(0.0, 0.5, 1.0, 0.5);
        assert_eq!(avg_min_dep(&p, 1e-6).unwrap(), 0.0);
        let b = covert_power(&p).unwrap();
        assert_eq!(b.p_j_covert, PowerBound::Finite(0.0));
    }

    #[test]
    fn budget_extremes() {
        let mut p = SystemParams::default();
        p.delta = 0.0;
        let b = covert_power(&p).unwrap();
        assert_eq!((b.p_j_covert, b.p_j_allowed_max), (PowerBound::Finite(0.0), 0.0));
        p.delta = 1.0;
        let b = covert_power(&p).unwrap();
        assert_eq!(b.p_j_covert, PowerBound::Unconstrained);
        assert_eq!(b.p_j_allowed_max, p.p_j_max);
    }

    #[test]
    fn budget_hits_target() {
        let p = params(0.5, 0.5, 10.0, 0.5);
        let b = covert_power(&p).unwrap();
        let PowerBound::Finite(pc) = b.p_j_covert else {
            panic!("expected a finite budget, got {b:?}")
        };
        assert!(pc > 0.0 && pc < p.p_j_max);
        let xi = avg_min_dep(&p, pc).unwrap();
        assert!(xi >= 0.5 && xi - 0.5 < 1e-6, "{xi}");
        assert!(b.covert_binding(p.p_j_max));
    }

    #[test]
    fn monte_carlo_is_consistent() {
        let p = params(0.5, 0.5, 10.0, 0.5);
        let mc = avg_min_dep_monte_carlo(&p, 5.0, 200_000, &Substreams::new(9)).unwrap();
        let q = avg_min_dep(&p, 5.0).unwrap();
        assert!((mc.mean - q).abs() < 4.0 * mc.std_error, "{mc:?} vs {q}");
    }
}
