//! AN power selection.
//!
//! [`algorithm1`] grid-searches the averaged objective `E[X](P_J)` over the
//! covert-feasible range `[0, min(P_J^max, P_J^covert)]`. [`pj_star_realization`]
//! is the per-block optimum for a monitor with instantaneous CSI, used as a
//! reference only.

use rayon::prelude::*;
use serde::Serialize;

use crate::covertness::{covert_power, CovertBudget};
use crate::error::{Error, Result};
use crate::model::{ChannelDraw, SystemParams};
use crate::surveillance::{ex_closed, ex_monte_carlo, ex_quadrature, ExOutcome};

/// How `E[X]` is evaluated inside the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExEvaluator {
    ClosedForm,
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

impl ExEvaluator {
    pub fn evaluate(&self, params: &SystemParams, p_j: f64) -> Result<ExOutcome> {
        match *self {
            ExEvaluator::ClosedForm => ex_closed(params, p_j),
            ExEvaluator::Quadrature => ex_quadrature(params, p_j),
            ExEvaluator::MonteCarlo { samples, seed } => ex_monte_carlo(params, p_j, samples, seed),
        }
    }
}

/// Which constraint pins the optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintActive {
    /// `P_J* = P_J^max < P_J^covert`.
    PowerCap,
    /// `P_J* = P_J^covert ≤ P_J^max`.
    CovertCap,
    Interior,
    /// `P_J* = 0`: passive eavesdropping.
    Silent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimResult {
    pub p_j_star: f64,
    pub ex_star: f64,
    /// `E[X]` evaluations performed.
    pub evaluations: usize,
    pub constraint_active: ConstraintActive,
    pub budget: CovertBudget,
    pub outcome: ExOutcome,
}

/// `step` used when none is given: a thousandth of the feasible range.
pub fn default_step(budget: &CovertBudget) -> f64 {
    budget.p_j_allowed_max / 1000.0
}

/// Powers `0, s, 2s, …` capped at `cap`, always ending exactly on `cap`.
pub fn power_grid(cap: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::ParameterDomain {
            name: "step",
            value: step,
            reason: "power step must be finite and > 0",
        });
    }
    if cap == 0.0 {
        return Ok(vec![0.0]);
    }
    let n = (cap / step).ceil() as usize;
    let mut grid: Vec<f64> = (0..n).map(|i| i as f64 * step).filter(|&p| p < cap).collect();
    grid.push(cap);
    Ok(grid)
}

/// Grid search for the covert AN power maximizing `E[X]`.
///
/// `step = None` uses [`default_step`]. Ties go to the smaller power. When the
/// covert budget is empty the result is the passive point `P_J = 0`.
pub fn algorithm1(params: &SystemParams, step: Option<f64>, method: ExEvaluator) -> Result<OptimResult> {
    let budget = covert_power(params)?;
    algorithm1_with_budget(params, &budget, step, method)
}

/// [`algorithm1`] with a precomputed budget.
pub fn algorithm1_with_budget(
    params: &SystemParams,
    budget: &CovertBudget,
    step: Option<f64>,
    method: ExEvaluator,
) -> Result<OptimResult> {
    params.validate()?;
    let cap = budget.p_j_allowed_max;
    let step = match step {
        Some(s) => s,
        None if cap > 0.0 => default_step(budget),
        None => 1.0,
    };
    let grid = power_grid(cap, step)?;
    let values = grid
        .par_iter()
        .map(|&p| method.evaluate(params, p))
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.value > values[best].value {
            best = i;
        }
    }
    let p_j_star = grid[best];
    let constraint_active = if p_j_star == 0.0 {
        ConstraintActive::Silent
    } else if p_j_star == cap {
        if budget.covert_binding(params.p_j_max) {
            ConstraintActive::CovertCap
        } else {
            ConstraintActive::PowerCap
        }
    } else {
        ConstraintActive::Interior
    };
    Ok(OptimResult {
        p_j_star,
        ex_star: values[best].value,
        evaluations: grid.len(),
        constraint_active,
        budget: *budget,
        outcome: values[best],
    })
}

/// Intermediates `Δ₁…Δ₄` of the per-realization optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaSet {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
}

impl DeltaSet {
    /// `Δ₃` and `Δ₄` depend on the AN power; they are evaluated at `p_j`.
    pub fn new(params: &SystemParams, draw: &ChannelDraw, p_j: f64) -> Result<DeltaSet> {
        if !(draw.h_am2 > 0.0) {
            return Err(Error::DegenerateDraw("|h_AM|^2 must be > 0"));
        }
        let SystemParams {
            p_a,
            sigma2_b,
            sigma2_m,
            eta,
            ..
        } = *params;
        let h_hat = draw.h_ab_hat2.sqrt();
        let h_mb = draw.h_mb2.sqrt();
        let h_am = draw.h_am2.sqrt();
        let h_mm = draw.h_mm2.sqrt();
        let sqrt_eta = eta.sqrt();
        let uncertain = p_a * draw.h_ab_tilde2;

        let d1 = draw.h_mb2 - sqrt_eta * h_mm * h_hat * h_mb / h_am;
        let d2 = h_hat * h_mb / (sqrt_eta * h_mm * h_am) * sigma2_m - uncertain - sigma2_b;
        let d3 = sigma2_m * draw.h_ab_hat2 * draw.h_mb2 / (uncertain + p_j * draw.h_mb2 + sigma2_b);
        let d4 = eta * draw.h_mm2 * draw.h_am2 * (uncertain + sigma2_b) / (eta * p_j * draw.h_mm2 + sigma2_m);
        Ok(DeltaSet { d1, d2, d3, d4 })
    }
}

/// Per-realization optimal AN power among `{0, cap, min(Δ₂/Δ₁, P_J^covert)}` with
/// `cap = min(P_J^max, P_J^covert)`.
pub fn pj_star_realization(params: &SystemParams, draw: &ChannelDraw, budget: &CovertBudget) -> Result<f64> {
    let cap = budget.p_j_allowed_max;
    let deltas = DeltaSet::new(params, draw, cap)?;
    if cap == 0.0 {
        return Ok(0.0);
    }
    let DeltaSet { d1, d2, d3, d4 } = deltas;
    let p_max = params.p_j_max;
    let p = if d1 > 0.0 && d2 > 0.0 {
        let root = d2 / d1;
        if root >= p_max {
            cap
        } else {
            root.min(cap)
        }
    } else if d1 == 0.0 && d2 > 0.0 {
        cap
    } else if d1 < 0.0 && d2 >= 0.0 {
        cap
    } else if d1 < 0.0 && d2 < 0.0 && d2 / d1 < p_max && d3 >= d4 {
        cap
    } else {
        0.0
    };
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covertness::PowerBound;
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
    fn grid_always_contains_both_ends() {
        let g = power_grid(1.0, 0.3).unwrap();
        assert_eq!(g.first(), Some(&0.0));
        assert_eq!(g.last(), Some(&1.0));
        assert_eq!(g.len(), 5);
        assert_eq!(power_grid(0.0, 0.1).unwrap(), vec![0.0]);
        assert!(power_grid(1.0, 0.0).is_err());
        assert_eq!(power_grid(1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn empty_budget_is_passive() {
        let p = SystemParams {
            delta: 0.0,
            ..fig6(-5.0)
        };
        let r = algorithm1(&p, None, ExEvaluator::Quadrature).unwrap();
        assert_eq!(r.p_j_star, 0.0);
        assert_eq!(r.constraint_active, ConstraintActive::Silent);
        assert_eq!(r.ex_star, ex_quadrature(&p, 0.0).unwrap().value);
    }

    #[test]
    fn strong_self_interference_keeps_monitor_silent() {
        let r = algorithm1(&fig6(6.0), None, ExEvaluator::ClosedForm).unwrap();
        assert_eq!(r.constraint_active, ConstraintActive::Silent);
    }

    #[test]
    fn weak_self_interference_uses_full_budget() {
        let r = algorithm1(&fig6(-12.0), None, ExEvaluator::ClosedForm).unwrap();
        assert_eq!(r.constraint_active, ConstraintActive::CovertCap);
        assert_eq!(r.p_j_star, r.budget.p_j_allowed_max);
    }

    fn draw() -> ChannelDraw {
        ChannelDraw {
            h_ab_hat2: 1.0,
            h_ab_tilde2: 0.1,
            h_ab2: 1.2,
            h_mb_hat2: 0.5,
            h_mb_tilde2: 0.5,
            h_mb2: 1.0,
            h_am2: 1.0,
            h_mm2: 1.0,
        }
    }

    #[test]
    fn zero_budget_realization() {
        let p = fig6(0.0);
        let b = CovertBudget {
            p_j_covert: PowerBound::Finite(0.0),
            p_j_allowed_max: 0.0,
        };
        assert_eq!(pj_star_realization(&p, &draw(), &b).unwrap(), 0.0);
    }

    #[test]
    fn nonpositive_delta2_is_silent() {
        // Δ₁ ≥ 0, Δ₂ ≤ 0: strong uncertain power at Bob
        let p = SystemParams {
            eta: 0.01,
            ..fig6(0.0)
        };
        let d = ChannelDraw {
            h_ab_tilde2: 10.0,
            ..draw()
        };
        let ds = DeltaSet::new(&p, &d, 1.0).unwrap();
        assert!(ds.d1 >= 0.0 && ds.d2 <= 0.0, "{ds:?}");
        let b = CovertBudget {
            p_j_covert: PowerBound::Unconstrained,
            p_j_allowed_max: p.p_j_max,
        };
        assert_eq!(pj_star_realization(&p, &d, &b).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_draw() {
        let d = ChannelDraw { h_am2: 0.0, ..draw() };
        let b = CovertBudget {
            p_j_covert: PowerBound::Unconstrained,
            p_j_allowed_max: 1.0,
        };
        assert!(matches!(
            pj_star_realization(&fig6(0.0), &d, &b),
            Err(Error::DegenerateDraw(_))
        ));
    }
}
