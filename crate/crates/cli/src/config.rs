//! Flat dotted-key experiment configuration.
//!
//! A config is a TOML document whose tables are flattened into dotted keys
//! (`params.rho_ab`, `sweep.var`, ...). Values from `--set key=value` replace
//! file values. Unknown keys are rejected.
//!
//! Powers and link gains follow the noise-normalized conventions of the figures:
//! `P_a = P̄_a σ²_b`, `P_J = P̄_J σ²_b`, `σ²_AB = γ̄_AB σ²_b`, `σ²_AM = γ̄_AM σ²_m`,
//! `σ²_MB = γ̄_MB σ²_b`, `σ²_MM = γ̄_MM σ²_m`. Each of these accepts a linear key or a
//! `_db` key, never both.

use std::collections::BTreeMap;
use std::path::PathBuf;

use covert_watch_core::{db_to_linear, SystemParams};
use serde::Serialize;
use toml::{Table, Value};

use crate::error::CliError;

pub type FlatConfig = BTreeMap<String, Value>;

/// Built-in figure presets.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3", include_str!("../presets/fig3.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5a", include_str!("../presets/fig5a.toml")),
    ("fig5b", include_str!("../presets/fig5b.toml")),
    ("fig6", include_str!("../presets/fig6.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
    ("fig8a", include_str!("../presets/fig8a.toml")),
    ("fig8b", include_str!("../presets/fig8b.toml")),
];

pub fn preset(name: &str) -> Result<&'static str, CliError> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
            CliError::Usage(format!("unknown preset `{name}` (available: {})", names.join(", ")))
        })
}

fn flatten_into(prefix: &str, table: &Table, out: &mut FlatConfig) {
    for (key, value) in table {
        let full = if prefix.is_empty() {
            key.clone()
        } else {
            format!("{prefix}.{key}")
        };
        match value {
            Value::Table(inner) => flatten_into(&full, inner, out),
            other => {
                out.insert(full, other.clone());
            }
        }
    }
}

pub fn parse_flat(text: &str) -> Result<FlatConfig, CliError> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Usage(format!("invalid config: {e}")))?;
    let mut out = FlatConfig::new();
    flatten_into("", &table, &mut out);
    Ok(out)
}

/// Parses `key=value`; the value is read as a TOML value, or as a bare string
/// when it is not valid TOML.
pub fn parse_override(text: &str) -> Result<(String, Value), CliError> {
    let (key, raw) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("`--set {text}`: expected key=value")))?;
    let key = key.trim().to_string();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));
    Ok((key, value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Db,
}

/// Quantities a sweep or series can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    PA,
    PJ,
    PJMax,
    GammaAb,
    GammaAm,
    GammaMb,
    GammaMm,
    RhoAb,
    RhoMb,
    Eta,
    Delta,
}

impl Variable {
    pub const NAMES: &'static [(&'static str, Variable)] = &[
        ("p_a", Variable::PA),
        ("p_j", Variable::PJ),
        ("p_j_max", Variable::PJMax),
        ("gamma_ab", Variable::GammaAb),
        ("gamma_am", Variable::GammaAm),
        ("gamma_mb", Variable::GammaMb),
        ("gamma_mm", Variable::GammaMm),
        ("rho_ab", Variable::RhoAb),
        ("rho_mb", Variable::RhoMb),
        ("eta", Variable::Eta),
        ("delta", Variable::Delta),
    ];

    pub fn parse(name: &str) -> Result<Variable, CliError> {
        Variable::NAMES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| {
                let names: Vec<&str> = Variable::NAMES.iter().map(|(n, _)| *n).collect();
                CliError::Usage(format!("unknown sweep variable `{name}` (expected one of {})", names.join(", ")))
            })
    }

    pub fn name(&self) -> &'static str {
        Variable::NAMES.iter().find(|(_, v)| v == self).map(|(n, _)| *n).unwrap()
    }

    /// Whether a dB scale makes sense for this quantity.
    fn is_power_like(&self) -> bool {
        !matches!(self, Variable::RhoAb | Variable::RhoMb | Variable::Eta | Variable::Delta)
    }
}

/// The model plus the AN power used where a scheme needs a fixed one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    pub params: SystemParams,
    /// AN power for fixed-power evaluations (`dep-sweep`, the `fixed` scheme).
    pub p_j: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub var: Variable,
    pub scale: Scale,
    /// Axis values in the axis' own unit (dB when `scale = db`).
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Passive,
    ConstantCovert,
    Optimal,
    /// `E[X]` at the configured `params.p_j`, without the covert constraint.
    Fixed,
}

impl Scheme {
    pub fn parse(name: &str) -> Result<Scheme, CliError> {
        match name {
            "passive" => Ok(Scheme::Passive),
            "constant_covert" => Ok(Scheme::ConstantCovert),
            "optimal" => Ok(Scheme::Optimal),
            "fixed" => Ok(Scheme::Fixed),
            other => Err(CliError::Usage(format!(
                "unknown scheme `{other}` (expected passive, constant_covert, optimal or fixed)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Passive => "passive",
            Scheme::ConstantCovert => "constant_covert",
            Scheme::Optimal => "optimal",
            Scheme::Fixed => "fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExChoice {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Normalized gains, needed to re-derive variances when the noise changes.
    pub normalized: Normalized,
    pub sweep: Option<Axis>,
    pub series: Option<Axis>,
    pub schemes: Vec<Scheme>,
    pub mc_samples: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Absolute AN power step for the search; `None` uses a thousandth of the range.
    pub step: Option<f64>,
    pub ex_method: ExChoice,
}

/// Noise-normalized inputs; [`Normalized::scenario`] converts to model units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Normalized {
    pub p_a: f64,
    pub p_j: f64,
    pub p_j_max: f64,
    pub gamma_ab: f64,
    pub gamma_am: f64,
    pub gamma_mb: f64,
    pub gamma_mm: f64,
    pub sigma2_b: f64,
    pub sigma2_m: f64,
    pub rho_ab: f64,
    pub rho_mb: f64,
    pub eta: f64,
    pub delta: f64,
}

impl Default for Normalized {
    /// `P̄_a = P̄_J^max = 25 dB`, unit gains and noise, `η = 0.5`, `ρ = δ = 0.5`.
    fn default() -> Self {
        Normalized {
            p_a: db_to_linear(25.0),
            p_j: db_to_linear(10.0),
            p_j_max: db_to_linear(25.0),
            gamma_ab: 1.0,
            gamma_am: 1.0,
            gamma_mb: 1.0,
            gamma_mm: 1.0,
            sigma2_b: 1.0,
            sigma2_m: 1.0,
            rho_ab: 0.5,
            rho_mb: 0.5,
            eta: 0.5,
            delta: 0.5,
        }
    }
}

impl Normalized {
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let params = SystemParams {
            p_a: self.p_a * self.sigma2_b,
            p_j_max: self.p_j_max * self.sigma2_b,
            sigma2_ab: self.gamma_ab * self.sigma2_b,
            sigma2_am: self.gamma_am * self.sigma2_m,
            sigma2_mb: self.gamma_mb * self.sigma2_b,
            sigma2_mm: self.gamma_mm * self.sigma2_m,
            sigma2_b: self.sigma2_b,
            sigma2_m: self.sigma2_m,
            rho_ab: self.rho_ab,
            rho_mb: self.rho_mb,
            eta: self.eta,
            delta: self.delta,
        };
        params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let p_j = self.p_j * self.sigma2_b;
        if !(p_j.is_finite() && p_j >= 0.0) {
            return Err(CliError::Usage(format!("params.p_j = {p_j} must be finite and >= 0")));
        }
        Ok(Scenario { params, p_j })
    }

    /// Copy with `var` set to `value` (linear).
    pub fn with(&self, var: Variable, value: f64) -> Normalized {
        let mut n = *self;
        let slot = match var {
            Variable::PA => &mut n.p_a,
            Variable::PJ => &mut n.p_j,
            Variable::PJMax => &mut n.p_j_max,
            Variable::GammaAb => &mut n.gamma_ab,
            Variable::GammaAm => &mut n.gamma_am,
            Variable::GammaMb => &mut n.gamma_mb,
            Variable::GammaMm => &mut n.gamma_mm,
            Variable::RhoAb => &mut n.rho_ab,
            Variable::RhoMb => &mut n.rho_mb,
            Variable::Eta => &mut n.eta,
            Variable::Delta => &mut n.delta,
        };
        *slot = value;
        n
    }
}

/// Converts an axis value to the linear model value.
pub fn axis_to_linear(scale: Scale, value: f64) -> f64 {
    match scale {
        Scale::Linear => value,
        Scale::Db => db_to_linear(value),
    }
}

struct Reader {
    flat: FlatConfig,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<Value> {
        self.flat.remove(key)
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Float(f)) => Ok(Some(f)),
            Some(Value::Integer(i)) => Ok(Some(i as f64)),
            Some(other) => Err(CliError::Usage(format!("`{key}` must be a number, got {other}"))),
        }
    }

    fn uint(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if i >= 0 => Ok(Some(i as u64)),
            Some(other) => Err(CliError::Usage(format!("`{key}` must be a non-negative integer, got {other}"))),
        }
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(CliError::Usage(format!("`{key}` must be a string, got {other}"))),
        }
    }

    fn floats(&mut self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    Value::Float(f) => Ok(f),
                    Value::Integer(i) => Ok(i as f64),
                    other => Err(CliError::Usage(format!("`{key}` entries must be numbers, got {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(other) => Err(CliError::Usage(format!("`{key}` must be an array of numbers, got {other}"))),
        }
    }

    fn strings(&mut self, key: &str) -> Result<Option<Vec<String>>, CliError> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    other => Err(CliError::Usage(format!("`{key}` entries must be strings, got {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(Value::String(s)) => Ok(Some(s.split(',').map(|p| p.trim().to_string()).collect())),
            Some(other) => Err(CliError::Usage(format!("`{key}` must be an array of strings, got {other}"))),
        }
    }

    /// A quantity given either linearly under `key` or in dB under `key_db`.
    fn level(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        let linear = self.float(key)?;
        let db = self.float(&format!("{key}_db"))?;
        match (linear, db) {
            (Some(_), Some(_)) => Err(CliError::Usage(format!("give `{key}` or `{key}_db`, not both"))),
            (Some(v), None) => Ok(Some(v)),
            (None, Some(d)) => Ok(Some(db_to_linear(d))),
            (None, None) => Ok(None),
        }
    }

    fn scale(&mut self, key: &str) -> Result<Scale, CliError> {
        match self.string(key)?.as_deref() {
            None | Some("linear") => Ok(Scale::Linear),
            Some("db") | Some("dB") => Ok(Scale::Db),
            Some(other) => Err(CliError::Usage(format!("`{key}` must be `linear` or `db`, got `{other}`"))),
        }
    }
}

fn check_axis(axis: &Axis) -> Result<(), CliError> {
    if axis.scale == Scale::Db && !axis.var.is_power_like() {
        return Err(CliError::Usage(format!("`{}` cannot be swept on a dB scale", axis.var.name())));
    }
    if axis.values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage("axis values must be finite".into()));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_flat(flat: FlatConfig) -> Result<ExperimentConfig, CliError> {
        let mut r = Reader { flat };
        let mut n = Normalized::default();
        macro_rules! level {
            ($key:literal, $field:ident) => {
                if let Some(v) = r.level($key)? {
                    n.$field = v;
                }
            };
        }
        level!("params.p_a", p_a);
        level!("params.p_j", p_j);
        level!("params.p_j_max", p_j_max);
        level!("params.gamma_ab", gamma_ab);
        level!("params.gamma_am", gamma_am);
        level!("params.gamma_mb", gamma_mb);
        level!("params.gamma_mm", gamma_mm);
        macro_rules! plain {
            ($key:literal, $field:ident) => {
                if let Some(v) = r.float($key)? {
                    n.$field = v;
                }
            };
        }
        plain!("params.sigma2_b", sigma2_b);
        plain!("params.sigma2_m", sigma2_m);
        plain!("params.rho_ab", rho_ab);
        plain!("params.rho_mb", rho_mb);
        plain!("params.eta", eta);
        plain!("params.delta", delta);
        let scenario = n.scenario()?;

        let sweep = match r.string("sweep.var")? {
            None => None,
            Some(var) => {
                let var = Variable::parse(&var)?;
                let scale = r.scale("sweep.scale")?;
                let start = r.float("sweep.start")?.ok_or_else(|| CliError::Usage("`sweep.start` missing".into()))?;
                let stop = r.float("sweep.stop")?.ok_or_else(|| CliError::Usage("`sweep.stop` missing".into()))?;
                let points = r.uint("sweep.points")?.unwrap_or(11) as usize;
                if points < 2 {
                    return Err(CliError::Usage("`sweep.points` must be >= 2".into()));
                }
                let values = (0..points)
                    .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
                    .collect();
                let axis = Axis { var, scale, values };
                check_axis(&axis)?;
                Some(axis)
            }
        };
        let series = match r.string("series.var")? {
            None => None,
            Some(var) => {
                let var = Variable::parse(&var)?;
                let scale = r.scale("series.scale")?;
                let values = r
                    .floats("series.values")?
                    .ok_or_else(|| CliError::Usage("`series.values` missing".into()))?;
                if values.is_empty() {
                    return Err(CliError::Usage("`series.values` is empty".into()));
                }
                let axis = Axis { var, scale, values };
                check_axis(&axis)?;
                Some(axis)
            }
        };
        let schemes = match r.strings("schemes")? {
            None => vec![Scheme::Passive, Scheme::ConstantCovert, Scheme::Optimal],
            Some(names) => names.iter().map(|s| Scheme::parse(s)).collect::<Result<_, _>>()?,
        };
        let mc_samples = r.uint("mc_samples")?.unwrap_or(0) as usize;
        let seed = r.uint("seed")?.unwrap_or(0);
        let output = r.string("output")?.map(PathBuf::from);
        let step = r.float("step")?;
        if let Some(s) = step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(CliError::Usage(format!("`step` must be finite and > 0, got {s}")));
            }
        }
        let ex_method = match r.string("ex.method")?.as_deref() {
            None | Some("closed_form") => ExChoice::ClosedForm,
            Some("quadrature") => ExChoice::Quadrature,
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "`ex.method` must be `closed_form` or `quadrature`, got `{other}`"
                )))
            }
        };
        // descriptive keys carried by presets
        r.take("title");
        if let Some(key) = r.flat.keys().next() {
            return Err(CliError::Usage(format!("unknown config key `{key}`")));
        }
        Ok(ExperimentConfig {
            scenario,
            normalized: n,
            sweep,
            series,
            schemes,
            mc_samples,
            seed,
            output,
            step,
            ex_method,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dotted_keys_and_tables_flatten_alike() {
        let a = parse_flat("params.rho_ab = 0.3\nsweep.var = \"eta\"").unwrap();
        let b = parse_flat("[params]\nrho_ab = 0.3\n[sweep]\nvar = \"eta\"").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn overrides_parse_as_toml_with_string_fallback() {
        assert_eq!(parse_override("seed=4").unwrap(), ("seed".into(), Value::Integer(4)));
        assert_eq!(parse_override("sweep.var=rho_ab").unwrap().1, Value::String("rho_ab".into()));
        assert_eq!(parse_override("params.eta = 0.25").unwrap().1, Value::Float(0.25));
        assert!(parse_override("novalue").is_err());
    }

    #[test]
    fn db_keys_convert() {
        let c = ExperimentConfig::from_flat(parse_flat("params.gamma_ab_db = 10\nparams.sigma2_b = 2").unwrap()).unwrap();
        assert!((c.scenario.params.sigma2_ab - 20.0).abs() < 1e-12);
        assert!((c.scenario.params.p_a - 2.0 * db_to_linear(25.0)).abs() < 1e-9);
    }

    #[test]
    fn rejects_unknown_and_conflicting_keys() {
        assert!(ExperimentConfig::from_flat(parse_flat("params.bogus = 1").unwrap()).is_err());
        assert!(ExperimentConfig::from_flat(parse_flat("params.p_a = 1\nparams.p_a_db = 0").unwrap()).is_err());
        assert!(ExperimentConfig::from_flat(parse_flat("sweep.var = \"nope\"\nsweep.start=0\nsweep.stop=1").unwrap()).is_err());
        assert!(ExperimentConfig::from_flat(parse_flat("sweep.var = \"rho_ab\"\nsweep.scale=\"db\"\nsweep.start=0\nsweep.stop=1").unwrap()).is_err());
        assert!(ExperimentConfig::from_flat(parse_flat("sweep.var = \"eta\"\nsweep.start=0\nsweep.stop=1\nsweep.points=1").unwrap()).is_err());
    }

    #[test]
    fn every_preset_parses() {
        for (name, text) in PRESETS {
            let c = ExperimentConfig::from_flat(parse_flat(text).unwrap());
            assert!(c.is_ok(), "{name}: {c:?}");
            assert!(c.unwrap().sweep.is_some(), "{name} has no sweep");
        }
    }

    #[test]
    fn db_round_trip() {
        for db in [-20.0, -7.5, 0.0, 3.0, 25.0] {
            assert!((covert_watch_core::linear_to_db(db_to_linear(db)) - db).abs() < 1e-12);
        }
    }
}
