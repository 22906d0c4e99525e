use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} out of domain: {reason}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("numeric domain violation: {0}")]
    NumericDomain(String),

    #[error("{what} evaluated to {value}, outside [0, 1]")]
    ProbabilityOutOfRange { what: &'static str, value: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error estimate {error_estimate}")]
    Quadrature { estimate: f64, error_estimate: f64 },

    #[error("closed form not valid here ({0}); use the direct quadrature evaluator")]
    ClosedFormDomain(&'static str),

    #[error("degenerate channel draw: {0}")]
    DegenerateDraw(&'static str),
}

impl Error {
    /// True for failures of an iterative numeric procedure, as opposed to bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::Quadrature { .. } | Error::NumericDomain(_))
    }
}

/// Slack allowed on raw probabilities before they are treated as a formula bug.
pub const PROBABILITY_SLACK: f64 = 1e-12;

/// Clamps a raw probability into [0, 1], refusing values that are out of range by
/// more than [`PROBABILITY_SLACK`].
pub fn checked_probability(what: &'static str, raw: f64) -> Result<f64> {
    if !raw.is_finite() || raw < -PROBABILITY_SLACK || raw > 1.0 + PROBABILITY_SLACK {
        return Err(Error::ProbabilityOutOfRange { what, value: raw });
    }
    Ok(raw.clamp(0.0, 1.0))
}
