//! The three commands. Each returns its output as a string so runs can be
//! compared byte for byte.

use covert_watch_core::covertness::avg_min_dep_monte_carlo;
use covert_watch_core::optimizer::algorithm1_with_budget;
use covert_watch_core::{
    avg_min_dep, covert_power, ex_monte_carlo, CovertBudget, ExEvaluator, ExMethod, OptimResult, Substreams,
    SystemParams,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{axis_to_linear, ExChoice, ExperimentConfig, Normalized, Scenario, Scheme};
use crate::error::CliError;

pub const CSV_HEADER: [&str; 7] = ["x", "scheme", "e_x", "p_j_star", "xi_bar", "method", "std_error"];

/// One CSV row. `e_x` is empty on Monte-Carlo DEP rows, which estimate `ξ̄*` only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub x: f64,
    pub scheme: String,
    pub e_x: Option<f64>,
    pub p_j_star: f64,
    pub xi_bar: f64,
    pub method: &'static str,
    pub std_error: f64,
}

fn evaluator(config: &ExperimentConfig) -> ExEvaluator {
    match config.ex_method {
        ExChoice::ClosedForm => ExEvaluator::ClosedForm,
        ExChoice::Quadrature => ExEvaluator::Quadrature,
    }
}

/// Every `(series label, x, normalized inputs)` point of the sweep, in output order.
fn points(config: &ExperimentConfig, default_label: &str) -> Result<Vec<(String, f64, Normalized)>, CliError> {
    let sweep = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs `sweep.var`, `sweep.start` and `sweep.stop`".into()))?;
    let series: Vec<(String, Normalized)> = match &config.series {
        None => vec![(default_label.to_string(), config.normalized)],
        Some(axis) => axis
            .values
            .iter()
            .map(|&v| {
                let label = format!("{default_label}@{}={v}", axis.var.name());
                (label, config.normalized.with(axis.var, axis_to_linear(axis.scale, v)))
            })
            .collect(),
    };
    let mut out = Vec::new();
    for (label, base) in series {
        for &x in &sweep.values {
            out.push((label.clone(), x, base.with(sweep.var, axis_to_linear(sweep.scale, x))));
        }
    }
    Ok(out)
}

fn to_csv(records: &[SweepRecord]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        let e_x = r.e_x.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([
            r.x.to_string(),
            r.scheme.clone(),
            e_x,
            r.p_j_star.to_string(),
            r.xi_bar.to_string(),
            r.method.to_string(),
            r.std_error.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `ξ̄*` at the fixed AN power `params.p_j` along the sweep, plus `E[X]` there.
pub fn dep_sweep_records(config: &ExperimentConfig) -> Result<Vec<SweepRecord>, CliError> {
    let pts = points(config, "fixed")?;
    let method = evaluator(config);
    let rows = pts
        .par_iter()
        .map(|(label, x, n)| -> Result<Vec<SweepRecord>, CliError> {
            let Scenario { params, p_j } = n.scenario()?;
            let xi = avg_min_dep(&params, p_j)?;
            let ex = method.evaluate(&params, p_j)?;
            let mut rows = vec![SweepRecord {
                x: *x,
                scheme: label.clone(),
                e_x: Some(ex.value),
                p_j_star: p_j,
                xi_bar: xi,
                method: ExMethod::Quadrature.as_str(),
                std_error: 0.0,
            }];
            if config.mc_samples > 0 {
                let mc = avg_min_dep_monte_carlo(&params, p_j, config.mc_samples, &Substreams::new(config.seed))?;
                rows.push(SweepRecord {
                    x: *x,
                    scheme: label.clone(),
                    e_x: None,
                    p_j_star: p_j,
                    xi_bar: mc.mean,
                    method: ExMethod::MonteCarlo.as_str(),
                    std_error: mc.std_error,
                });
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn dep_sweep(config: &ExperimentConfig) -> Result<String, CliError> {
    to_csv(&dep_sweep_records(config)?)
}

/// AN power each scheme would use, with the search result for `optimal`.
fn scheme_power(
    scheme: Scheme,
    scenario: &Scenario,
    budget: &CovertBudget,
    config: &ExperimentConfig,
) -> Result<(f64, Option<OptimResult>), CliError> {
    Ok(match scheme {
        Scheme::Passive => (0.0, None),
        Scheme::ConstantCovert => (budget.p_j_allowed_max, None),
        Scheme::Fixed => (scenario.p_j, None),
        Scheme::Optimal => {
            let r = algorithm1_with_budget(&scenario.params, budget, config.step, evaluator(config))?;
            (r.p_j_star, Some(r))
        }
    })
}

/// `E[X]` per scheme along the sweep.
pub fn ex_sweep_records(config: &ExperimentConfig) -> Result<Vec<SweepRecord>, CliError> {
    let pts = points(config, "")?;
    let method = evaluator(config);
    let rows = pts
        .par_iter()
        .map(|(label, x, n)| -> Result<Vec<SweepRecord>, CliError> {
            let scenario = n.scenario()?;
            let params = scenario.params;
            let budget = covert_power(&params)?;
            let mut rows = Vec::new();
            for &scheme in &config.schemes {
                let (p, search) = scheme_power(scheme, &scenario, &budget, config)?;
                let outcome = match search {
                    Some(r) => r.outcome,
                    None => method.evaluate(&params, p)?,
                };
                let xi = avg_min_dep(&params, p)?;
                let name = format!("{}{label}", scheme.name());
                rows.push(SweepRecord {
                    x: *x,
                    scheme: name.clone(),
                    e_x: Some(outcome.value),
                    p_j_star: p,
                    xi_bar: xi,
                    method: outcome.method.as_str(),
                    std_error: outcome.std_error,
                });
                if config.mc_samples > 0 {
                    let mc = ex_monte_carlo(&params, p, config.mc_samples, config.seed)?;
                    rows.push(SweepRecord {
                        x: *x,
                        scheme: name,
                        e_x: Some(mc.value),
                        p_j_star: p,
                        xi_bar: xi,
                        method: mc.method.as_str(),
                        std_error: mc.std_error,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn ex_sweep(config: &ExperimentConfig) -> Result<String, CliError> {
    to_csv(&ex_sweep_records(config)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeReport {
    pub params: SystemParams,
    pub budget: CovertBudget,
    pub result: OptimResult,
    /// `ξ̄*` at the chosen power.
    pub xi_bar: f64,
    pub passive_e_x: f64,
    pub constant_covert_e_x: f64,
    /// True when the covert budget is empty and the monitor stays passive.
    pub passive_fallback: bool,
}

pub fn optimize_report(config: &ExperimentConfig) -> Result<OptimizeReport, CliError> {
    let params = config.scenario.params;
    let method = evaluator(config);
    let budget = covert_power(&params)?;
    let result = algorithm1_with_budget(&params, &budget, config.step, method)?;
    Ok(OptimizeReport {
        params,
        budget,
        xi_bar: avg_min_dep(&params, result.p_j_star)?,
        passive_e_x: method.evaluate(&params, 0.0)?.value,
        constant_covert_e_x: method.evaluate(&params, budget.p_j_allowed_max)?.value,
        passive_fallback: budget.p_j_allowed_max == 0.0,
        result,
    })
}

pub fn optimize(config: &ExperimentConfig) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(&optimize_report(config)?)?;
    text.push('\n');
    Ok(text)
}
