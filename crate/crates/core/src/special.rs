//! Exponentially scaled exponential integral `L(x) = exp(x) Ei(-x)`.
//!
//! For `x > 0`, `Ei(-x) = -E1(x)`, so `L(x) = -exp(x) E1(x)`. The scaling keeps
//! the value finite for all positive `x`: `L(x) ~ ln(x) + γ` near zero and
//! `L(x) ~ -1/x` for large `x`.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Series and continued fraction meet here; both sides hold ~1e-15 relative error.
const SERIES_LIMIT: f64 = 1.5;

const MAX_TERMS: usize = 500;

/// `L(x) = exp(x) Ei(-x)` for `x > 0`.
pub fn exp_scaled_ei(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::ParameterDomain {
            name: "x",
            value: x,
            reason: "exp(x)Ei(-x) requires a finite x > 0",
        });
    }
    let scaled_e1 = if x <= SERIES_LIMIT {
        e1_series(x) * x.exp()
    } else {
        scaled_e1_continued_fraction(x)
    };
    Ok(-scaled_e1)
}

/// `E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)`.
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..MAX_TERMS {
        let k = k as f64;
        term *= -x / k;
        let contribution = term / k;
        sum += contribution;
        if contribution.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// `exp(x) E1(x)` by the modified Lentz evaluation of
/// `1/(x+1- 1/(x+3- 4/(x+5- ...)))`.
fn scaled_e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let i = i as f64;
        let an = -i * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive() {
        assert!(exp_scaled_ei(0.0).is_err());
        assert!(exp_scaled_ei(-1.0).is_err());
        assert!(exp_scaled_ei(f64::NAN).is_err());
    }

    #[test]
    fn value_at_one() {
        // -e * E1(1), E1(1) = 0.21938393439552027
        let expected = -std::f64::consts::E * 0.219_383_934_395_520_27;
        let got = exp_scaled_ei(1.0).unwrap();
        assert!((got - expected).abs() < 1e-14 * expected.abs());
        assert!((got + 0.596_347).abs() < 5e-7);
    }

    #[test]
    fn small_argument_truncated_series() {
        let x: f64 = 0.01;
        let approx = x.exp() * (EULER_GAMMA + x.ln() - x * (1.0 - x / 4.0));
        assert!((exp_scaled_ei(x).unwrap() - approx).abs() <= 1e-6);
    }

    #[test]
    fn leading_asymptotic_term() {
        for &x in &[1e3, 1e4, 1e5, 1e6] {
            let l = exp_scaled_ei(x).unwrap();
            assert!((x * l + 1.0).abs() <= 2.0 / x, "x = {x}");
        }
    }

    #[test]
    fn continuous_across_the_method_switch() {
        let series = e1_series(SERIES_LIMIT) * SERIES_LIMIT.exp();
        let fraction = scaled_e1_continued_fraction(SERIES_LIMIT);
        assert!((series - fraction).abs() < 1e-14 * fraction);
        assert!((e1_series(2.0) * 2f64.exp() - scaled_e1_continued_fraction(2.0)).abs() < 1e-13);
    }
}
