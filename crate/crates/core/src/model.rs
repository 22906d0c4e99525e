//! System parameters and joint fading realizations.
//!
//! Every link is Rayleigh faded. The suspicious link `A→B` and the jamming link
//! `M→B` are split, from Bob's point of view, into a known part and an
//! independent uncertain part whose variances are `(1-ρ)σ²` and `ρσ²`.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::Substreams;

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Static scalars of the surveillance scenario. Powers and variances are linear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Alice's transmit power.
    pub p_a: f64,
    /// Monitor's AN power limit.
    pub p_j_max: f64,
    pub sigma2_ab: f64,
    pub sigma2_am: f64,
    pub sigma2_mb: f64,
    pub sigma2_mm: f64,
    /// Noise variance at Bob.
    pub sigma2_b: f64,
    /// Noise variance at the monitor.
    pub sigma2_m: f64,
    /// Share of the suspicious-link variance unknown to Bob.
    pub rho_ab: f64,
    /// Share of the jamming-link variance unknown to Bob.
    pub rho_mb: f64,
    /// Residual self-interference after passive suppression.
    pub eta: f64,
    /// Covertness threshold: AN is covert while the averaged minimum DEP stays ≥ 1-δ.
    pub delta: f64,
}

impl Default for SystemParams {
    /// Unit noise, `P_a = P_J^max = 25 dB`, unit link gains, `η = 0.5`.
    fn default() -> Self {
        SystemParams {
            p_a: db_to_linear(25.0),
            p_j_max: db_to_linear(25.0),
            sigma2_ab: 1.0,
            sigma2_am: 1.0,
            sigma2_mb: 1.0,
            sigma2_mm: 1.0,
            sigma2_b: 1.0,
            sigma2_m: 1.0,
            rho_ab: 0.5,
            rho_mb: 0.5,
            eta: 0.5,
            delta: 0.5,
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}

fn unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ParameterDomain {
            name,
            value,
            reason: "must lie in [0, 1]",
        })
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        positive("p_a", self.p_a)?;
        if !(self.p_j_max.is_finite() && self.p_j_max >= 0.0) {
            return Err(Error::ParameterDomain {
                name: "p_j_max",
                value: self.p_j_max,
                reason: "must be finite and >= 0",
            });
        }
        positive("sigma2_ab", self.sigma2_ab)?;
        positive("sigma2_am", self.sigma2_am)?;
        positive("sigma2_mb", self.sigma2_mb)?;
        positive("sigma2_mm", self.sigma2_mm)?;
        positive("sigma2_b", self.sigma2_b)?;
        positive("sigma2_m", self.sigma2_m)?;
        unit_interval("rho_ab", self.rho_ab)?;
        unit_interval("rho_mb", self.rho_mb)?;
        unit_interval("eta", self.eta)?;
        unit_interval("delta", self.delta)?;
        Ok(())
    }

    pub(crate) fn check_power(p_j: f64) -> Result<()> {
        if p_j.is_finite() && p_j >= 0.0 {
            Ok(())
        } else {
            Err(Error::ParameterDomain {
                name: "p_j",
                value: p_j,
                reason: "AN power must be finite and >= 0",
            })
        }
    }

    /// Mean of `P_a|h̃_AB|²`, the suspicious-link power Bob cannot predict.
    pub fn lambda_a(&self) -> f64 {
        self.rho_ab * self.p_a * self.sigma2_ab
    }

    /// Mean of `P_J|h̃_MB|²`, the jamming-link power Bob cannot predict.
    pub fn lambda_m(&self, p_j: f64) -> f64 {
        self.rho_mb * p_j * self.sigma2_mb
    }

    /// Mean of `X₂ = P_J|ĥ_MB|²`, the jamming power Bob can predict.
    pub fn known_jamming_mean(&self, p_j: f64) -> f64 {
        (1.0 - self.rho_mb) * p_j * self.sigma2_mb
    }
}

/// One block of quasi-static fading, as squared channel magnitudes.
///
/// `h_ab2` and `h_mb2` are the full-link gains `|ĥ + h̃|²`; the split parts are
/// drawn so that `ĥ` and `h̃` are independent circular Gaussians summing to the
/// full coefficient, which keeps the full gain exactly `Exp(σ²)` and independent
/// of `ρ` for a fixed stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelDraw {
    pub h_ab_hat2: f64,
    pub h_ab_tilde2: f64,
    pub h_ab2: f64,
    pub h_mb_hat2: f64,
    pub h_mb_tilde2: f64,
    pub h_mb2: f64,
    pub h_am2: f64,
    pub h_mm2: f64,
}

#[derive(Debug, Clone, Copy)]
struct SplitGain {
    hat2: f64,
    tilde2: f64,
    full2: f64,
}

/// `h ~ CN(0, σ²)`, then `ĥ | h ~ CN((1-ρ)h, ρ(1-ρ)σ²)` and `h̃ = h - ĥ`.
fn split_link<R: Rng + ?Sized>(rng: &mut R, sigma2: f64, rho: f64) -> SplitGain {
    let s = (0.5 * sigma2).sqrt();
    let h_re = s * rng.sample::<f64, _>(StandardNormal);
    let h_im = s * rng.sample::<f64, _>(StandardNormal);
    let c = (0.5 * rho * (1.0 - rho) * sigma2).sqrt();
    let z_re: f64 = rng.sample(StandardNormal);
    let z_im: f64 = rng.sample(StandardNormal);
    let hat_re = (1.0 - rho) * h_re + c * z_re;
    let hat_im = (1.0 - rho) * h_im + c * z_im;
    let tilde_re = h_re - hat_re;
    let tilde_im = h_im - hat_im;
    SplitGain {
        hat2: hat_re * hat_re + hat_im * hat_im,
        tilde2: tilde_re * tilde_re + tilde_im * tilde_im,
        full2: h_re * h_re + h_im * h_im,
    }
}

impl ChannelDraw {
    pub fn sample<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> ChannelDraw {
        let ab = split_link(rng, params.sigma2_ab, params.rho_ab);
        let mb = split_link(rng, params.sigma2_mb, params.rho_mb);
        let e_am: f64 = rng.sample(Exp1);
        let e_mm: f64 = rng.sample(Exp1);
        ChannelDraw {
            h_ab_hat2: ab.hat2,
            h_ab_tilde2: ab.tilde2,
            h_ab2: ab.full2,
            h_mb_hat2: mb.hat2,
            h_mb_tilde2: mb.tilde2,
            h_mb2: mb.full2,
            h_am2: params.sigma2_am * e_am,
            h_mm2: params.sigma2_mm * e_mm,
        }
    }

    /// `X₁ = P_a|ĥ_AB|²`.
    pub fn x1(&self, params: &SystemParams) -> f64 {
        params.p_a * self.h_ab_hat2
    }

    /// `X₂ = P_J|ĥ_MB|²`.
    pub fn x2(&self, p_j: f64) -> f64 {
        p_j * self.h_mb_hat2
    }
}

/// Draws `n` independent channel realizations.
///
/// The sequence is a pure function of `(params, seed, n)`.
pub fn sample_channels(params: &SystemParams, streams: &Substreams, n: usize) -> Result<Vec<ChannelDraw>> {
    params.validate()?;
    if n == 0 {
        return Err(Error::ParameterDomain {
            name: "n",
            value: 0.0,
            reason: "at least one draw is required",
        });
    }
    let chunks = streams.map_chunks(n, |rng, len| {
        (0..len).map(|_| ChannelDraw::sample(params, rng)).collect::<Vec<_>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}
