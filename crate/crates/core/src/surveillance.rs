//! Achievable rates and the eavesdropping non-outage probability
//! `E[X] = Pr(R_M ≥ R_B) = Pr(γ_M ≥ γ_B)`.
//!
//! ```text
//! γ_M = P_a|h_AM|² / (ηP_J|h_MM|² + σ²_m)
//! γ_B = P_a|ĥ_AB|² / (P_a|h̃_AB|² + P_J|h_MB|² + σ²_b)
//! ```
//!
//! Bob's SINR counts the uncertain part of the suspicious link as interference,
//! which is the effective rate he can guarantee under channel uncertainty.
//! Three evaluators are provided: the closed form built from
//! `L(x) = eˣEi(-x)`, direct quadrature of `∫F_{γ_B} f_{γ_M}`, and Monte-Carlo.

use serde::Serialize;

use crate::error::{checked_probability, Error, Result};
use crate::model::{ChannelDraw, SystemParams};
use crate::quad::{integrate_half_line, Tolerance};
use crate::special::exp_scaled_ei;
use crate::stream::{Moments, Substreams};

/// Scale ratios closer than this (relative) make the closed form singular.
pub const DEGENERACY_REL: f64 = 1e-7;

/// Fewest Monte-Carlo draws accepted by [`ex_monte_carlo`].
pub const MIN_MC_SAMPLES: usize = 1000;

/// `log₂(1 + P_a|h_AB|²/(P_J|h_MB|² + σ²_b))`.
pub fn rate_bob(p_a: f64, h_ab2: f64, p_j: f64, h_mb2: f64, sigma2_b: f64) -> f64 {
    (p_a * h_ab2 / (p_j * h_mb2 + sigma2_b)).ln_1p() / std::f64::consts::LN_2
}

/// `log₂(1 + P_a|h_AM|²/(ηP_J|h_MM|² + σ²_m))`.
pub fn rate_monitor(p_a: f64, h_am2: f64, p_j: f64, eta: f64, h_mm2: f64, sigma2_m: f64) -> f64 {
    (p_a * h_am2 / (eta * p_j * h_mm2 + sigma2_m)).ln_1p() / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinrPair {
    pub gamma_m: f64,
    pub gamma_b: f64,
}

impl SinrPair {
    /// SINRs of one realization, with Bob's uncertain suspicious-link power as interference.
    pub fn split(params: &SystemParams, draw: &ChannelDraw, p_j: f64) -> SinrPair {
        SinrPair {
            gamma_m: params.p_a * draw.h_am2 / (params.eta * p_j * draw.h_mm2 + params.sigma2_m),
            gamma_b: params.p_a * draw.h_ab_hat2
                / (params.p_a * draw.h_ab_tilde2 + p_j * draw.h_mb2 + params.sigma2_b),
        }
    }

    /// Same, but splitting the full gain proportionally: `(1-ρ)|h_AB|²` known and
    /// `ρ|h_AB|²` uncertain. This is not equal in distribution to [`SinrPair::split`]:
    /// the two parts become perfectly correlated.
    pub fn proportional(params: &SystemParams, draw: &ChannelDraw, p_j: f64) -> SinrPair {
        let rho = params.rho_ab;
        SinrPair {
            gamma_m: params.p_a * draw.h_am2 / (params.eta * p_j * draw.h_mm2 + params.sigma2_m),
            gamma_b: (1.0 - rho) * params.p_a * draw.h_ab2
                / (rho * params.p_a * draw.h_ab2 + p_j * draw.h_mb2 + params.sigma2_b),
        }
    }

    pub fn eavesdrops(&self) -> bool {
        self.gamma_m >= self.gamma_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl ExMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExMethod::ClosedForm => "closed_form",
            ExMethod::Quadrature => "quadrature",
            ExMethod::MonteCarlo => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExOutcome {
    pub value: f64,
    pub method: ExMethod,
    /// Zero for deterministic methods.
    pub std_error: f64,
}

/// Scales of the SINR distributions at AN power `p_j`.
#[derive(Debug, Clone, Copy)]
struct Scales {
    /// `(1-ρ)P_aσ²_AB`, mean of the known suspicious power.
    known: f64,
    /// `ρP_aσ²_AB`.
    uncertain: f64,
    /// `P_Jσ²_MB`.
    jam: f64,
    /// `P_aσ²_AM`.
    monitor: f64,
    /// `ηP_Jσ²_MM`.
    self_interference: f64,
}

impl Scales {
    fn new(params: &SystemParams, p_j: f64) -> Scales {
        Scales {
            known: (1.0 - params.rho_ab) * params.p_a * params.sigma2_ab,
            uncertain: params.rho_ab * params.p_a * params.sigma2_ab,
            jam: p_j * params.sigma2_mb,
            monitor: params.p_a * params.sigma2_am,
            self_interference: params.eta * p_j * params.sigma2_mm,
        }
    }
}

/// `F_{γ_M}(x) = 1 - e^{-xσ²_m/(P_aσ²_AM)} / (1 + xηP_Jσ²_MM/(P_aσ²_AM))`.
pub fn gamma_m_cdf(params: &SystemParams, p_j: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = Scales::new(params, p_j);
    1.0 - (-x * params.sigma2_m / s.monitor).exp() / (1.0 + x * s.self_interference / s.monitor)
}

/// Density of `γ_M`.
pub fn gamma_m_pdf(params: &SystemParams, p_j: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let s = Scales::new(params, p_j);
    let q = params.sigma2_m / s.monitor;
    let c = s.self_interference / s.monitor;
    let d = 1.0 + x * c;
    (-x * q).exp() * (q / d + c / (d * d))
}

/// `F_{γ_B}(x) = 1 - e^{-xσ²_b/A} / ((1 + xρP_aσ²_AB/A)(1 + xP_Jσ²_MB/A))`, `A = (1-ρ)P_aσ²_AB`.
pub fn gamma_b_cdf(params: &SystemParams, p_j: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let s = Scales::new(params, p_j);
    if s.known == 0.0 {
        return 1.0;
    }
    1.0 - (-x * params.sigma2_b / s.known).exp()
        / ((1.0 + x * s.uncertain / s.known) * (1.0 + x * s.jam / s.known))
}

fn quadrature_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-11,
        rel: 1e-13,
        max_intervals: 4000,
    }
}

/// `E[X] = ∫ F_{γ_B}(x) f_{γ_M}(x) dx`, evaluated as `1 - ∫ (1-F_{γ_B}) f_{γ_M}`.
pub fn ex_quadrature(params: &SystemParams, p_j: f64) -> Result<ExOutcome> {
    params.validate()?;
    SystemParams::check_power(p_j)?;
    let s = Scales::new(params, p_j);
    let outcome = |value| ExOutcome {
        value,
        method: ExMethod::Quadrature,
        std_error: 0.0,
    };
    if s.known == 0.0 {
        // Bob has no usable signal: γ_B ≡ 0
        return Ok(outcome(1.0));
    }
    let q = params.sigma2_m / s.monitor;
    let b = params.sigma2_b / s.known;
    let u = s.uncertain / s.known;
    let v = s.jam / s.known;
    let c = s.self_interference / s.monitor;
    let scale = 1.0 / (q + b);
    let est = if p_j == 0.0 {
        // γ_M is exponential; only the uncertain suspicious power interferes at Bob
        integrate_half_line(|x| (-x * (q + b)).exp() * q / (1.0 + x * u), scale, quadrature_tolerance())?
    } else {
        integrate_half_line(
            |x| {
                let d = 1.0 + x * c;
                (-x * (q + b)).exp() * (q / d + c / (d * d)) / ((1.0 + x * u) * (1.0 + x * v))
            },
            scale,
            quadrature_tolerance(),
        )?
    };
    Ok(outcome(checked_probability("non-outage probability", 1.0 - est.value)?))
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= DEGENERACY_REL * x.abs().max(y.abs())
}

/// The closed form's four-term expression. Callers guarantee `p_j > 0`,
/// `0 < ρ_ab < 1`, `η > 0` and pairwise-distinct scale ratios.
fn ex_closed_terms(params: &SystemParams, p_j: f64) -> Result<f64> {
    let SystemParams {
        p_a,
        sigma2_ab: s_ab,
        sigma2_am: s_am,
        sigma2_mb: s_mb,
        sigma2_mm: s_mm,
        sigma2_b: s_b,
        sigma2_m: s_m,
        rho_ab: r,
        eta,
        ..
    } = *params;
    let l = exp_scaled_ei;

    let t1 = (s_b / ((1.0 - r) * p_a * s_ab)
        - 1.0 / (p_a * s_am / (eta * p_j * s_mm) - (1.0 - r) / r)
        - 1.0 / (p_a * s_am / (eta * p_j * s_mm) - (1.0 - r) * p_a * s_ab / (p_j * s_mb)))
        / (s_am * s_mb / (eta * s_mm * (1.0 - r) * s_ab) - 1.0)
        / (r / (1.0 - r) - eta * p_j * s_mm / (p_a * s_am))
        * l(s_am * s_b / (eta * (1.0 - r) * p_j * s_mm * s_ab) + s_m / (eta * p_j * s_mm))?;

    let t2 = 1.0 / (p_a * s_ab * r - p_j * s_mb)
        / (s_am / ((1.0 - r) * s_ab) - eta * p_j * s_mm / (r * p_a * s_ab))
        * (1.0 / (1.0 / (eta * p_j * s_mm) - (1.0 - r) / (r * p_a * s_am)) + s_m)
        * l(s_b / (r * p_a * s_ab) + (1.0 - r) * s_m / (r * p_a * s_am))?;

    let t3 = 1.0 / (p_a * s_ab * r - p_j * s_mb)
        / (s_am / ((1.0 - r) * s_ab) - eta * s_mm / s_mb)
        * (1.0 / (1.0 / (eta * p_j * s_mm) - (1.0 - r) * s_ab / (p_j * s_mb * s_am)) + s_m)
        * l(s_b / (p_j * s_mb) + (1.0 - r) * s_ab * s_m / (p_j * s_mb * s_am))?;

    let t4 = 1.0
        / (p_a * s_am * s_mb / (eta * (1.0 - r) * p_a * s_mm * s_ab) - 1.0)
        / (r * p_a * s_am / (eta * (1.0 - r) * p_j * s_mm) - 1.0);

    Ok(1.0 - t1 + t2 - t3 - t4)
}

/// Closed-form `E[X]`.
///
/// Falls back to [`ex_quadrature`] (and reports [`ExMethod::Quadrature`]) where
/// the closed form is undefined: `P_J = 0`, `η = 0`, `ρ_ab ∈ {0, 1}`, or when two
/// of the ratios `(1-ρ)/ρ`, `(1-ρ)P_aσ²_AB/(P_Jσ²_MB)`, `P_aσ²_AM/(ηP_Jσ²_MM)`
/// coincide (removable singularities).
pub fn ex_closed(params: &SystemParams, p_j: f64) -> Result<ExOutcome> {
    params.validate()?;
    SystemParams::check_power(p_j)?;
    let r = params.rho_ab;
    if p_j == 0.0 || params.eta == 0.0 || r == 0.0 || r == 1.0 {
        return ex_quadrature(params, p_j);
    }
    let s = Scales::new(params, p_j);
    let a1 = s.known / s.uncertain;
    let a2 = s.known / s.jam;
    let a3 = s.monitor / s.self_interference;
    if near(a1, a2) || near(a1, a3) || near(a2, a3) {
        return ex_quadrature(params, p_j);
    }
    let raw = ex_closed_terms(params, p_j)?;
    if !raw.is_finite() {
        return Err(Error::NumericDomain(format!("closed-form E[X] evaluated to {raw}")));
    }
    Ok(ExOutcome {
        value: checked_probability("non-outage probability (closed form)", raw)?,
        method: ExMethod::ClosedForm,
        std_error: 0.0,
    })
}

/// Which `γ_B` construction the Monte-Carlo estimator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum McForm {
    /// Independent known and uncertain parts (the model the closed form assumes).
    #[default]
    Split,
    /// Proportional split of the full gain; kept for comparison only.
    Proportional,
}

/// Monte-Carlo `E[X]` with the binomial standard error.
pub fn ex_monte_carlo(params: &SystemParams, p_j: f64, n: usize, seed: u64) -> Result<ExOutcome> {
    ex_monte_carlo_with(params, p_j, n, seed, McForm::Split)
}

pub fn ex_monte_carlo_with(params: &SystemParams, p_j: f64, n: usize, seed: u64, form: McForm) -> Result<ExOutcome> {
    params.validate()?;
    SystemParams::check_power(p_j)?;
    if n < MIN_MC_SAMPLES {
        return Err(Error::ParameterDomain {
            name: "n",
            value: n as f64,
            reason: "Monte-Carlo needs at least 1000 draws",
        });
    }
    let parts = Substreams::new(seed).map_chunks(n, |rng, len| {
        let mut m = Moments::default();
        for _ in 0..len {
            let draw = ChannelDraw::sample(params, rng);
            let sinr = match form {
                McForm::Split => SinrPair::split(params, &draw, p_j),
                McForm::Proportional => SinrPair::proportional(params, &draw, p_j),
            };
            m.push(if sinr.eavesdrops() { 1.0 } else { 0.0 });
        }
        m
    });
    let est = Moments::merge(&parts).estimate();
    Ok(ExOutcome {
        value: est.mean,
        method: ExMethod::MonteCarlo,
        std_error: est.std_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::db_to_linear;

    fn fig6(gamma_mm_db: f64) -> SystemParams {
        SystemParams {
            p_a: db_to_linear(25.0),
            p_j_max: db_to_linear(25.0),
            sigma2_ab: db_to_linear(5.0),
            sigma2_am: db_to_linear(-10.0),
            sigma2_mb: db_to_linear(10.0),
            sigma2_mm: db_to_linear(gamma_mm_db),
            rho_ab: 0.5,
            rho_mb: 0.5,
            eta: 0.1,
            delta: 0.5,
            ..SystemParams::default()
        }
    }

    #[test]
    fn rates() {
        assert_eq!(rate_bob(1.0, 1.0, 0.0, 7.0, 1.0), 1.0);
        assert_eq!(rate_bob(0.0, 1.0, 1.0, 1.0, 1.0), 0.0);
        assert!((rate_bob(2.0, 1.5, 1.0, 0.5, 1.0) - 3f64.log2()).abs() < 1e-15);
        assert_eq!(rate_monitor(1.0, 1.0, 0.0, 0.3, 5.0, 1.0), 1.0);
        assert!((rate_monitor(2.0, 1.0, 4.0, 0.5, 1.0, 1.0) - (5.0f64 / 3.0).log2()).abs() < 1e-15);
        assert_eq!(rate_monitor(3.0, 2.0, 9.0, 0.0, 4.0, 1.0), rate_bob(3.0, 2.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn cdfs_are_valid() {
        let p = fig6(-5.0);
        for pj in [0.0, 1.0, 50.0] {
            assert_eq!(gamma_m_cdf(&p, pj, 0.0), 0.0);
            assert_eq!(gamma_b_cdf(&p, pj, 0.0), 0.0);
            assert!(gamma_m_cdf(&p, pj, 1e12) > 1.0 - 1e-9);
            assert!(gamma_b_cdf(&p, pj, 1e12) > 1.0 - 1e-9);
            let total = integrate_half_line(|x| gamma_m_pdf(&p, pj, x), 1.0, Tolerance::default()).unwrap();
            assert!((total.value - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn silent_monitor_without_uncertainty_symmetric() {
        let p = SystemParams {
            rho_ab: 0.0,
            sigma2_ab: 2.0,
            sigma2_am: 2.0,
            ..SystemParams::default()
        };
        let e = ex_quadrature(&p, 0.0).unwrap();
        assert!((e.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for g in [-10.0, -3.0, 0.0, 4.0] {
            let p = fig6(g);
            for pj in [0.5, 10.0, 300.0] {
                let c = ex_closed(&p, pj).unwrap();
                let q = ex_quadrature(&p, pj).unwrap();
                assert_eq!(c.method, ExMethod::ClosedForm);
                assert!((c.value - q.value).abs() < 1e-9, "g={g} pj={pj}: {} vs {}", c.value, q.value);
            }
        }
    }

    #[test]
    fn degenerate_ratios_fall_back() {
        let p = SystemParams::default();
        // (1-ρ)/ρ = 1 = (1-ρ)P_aσ²_AB/(P_Jσ²_MB) at P_J = P_a/2
        let e = ex_closed(&p, 0.5 * p.p_a).unwrap();
        assert_eq!(e.method, ExMethod::Quadrature);
        let e = ex_closed(&p, 0.0).unwrap();
        assert_eq!(e.method, ExMethod::Quadrature);
    }

    #[test]
    fn bob_without_known_signal_always_loses() {
        let p = SystemParams {
            rho_ab: 1.0,
            ..SystemParams::default()
        };
        assert_eq!(ex_quadrature(&p, 3.0).unwrap().value, 1.0);
        assert_eq!(ex_monte_carlo(&p, 3.0, 5000, 1).unwrap().value, 1.0);
    }

    #[test]
    fn monte_carlo_agrees() {
        let p = fig6(-5.0);
        let mc = ex_monte_carlo(&p, 10.0, 200_000, 5).unwrap();
        let c = ex_closed(&p, 10.0).unwrap();
        assert!((mc.value - c.value).abs() < 4.0 * mc.std_error, "{mc:?} vs {c:?}");
    }

    #[test]
    fn monte_carlo_rejects_tiny_runs() {
        assert!(ex_monte_carlo(&SystemParams::default(), 1.0, 10, 0).is_err());
    }
}
