//! Probabilistic primitives: the prior, the two-type source mixture, and the
//! densities of a signal before and after truncation to a censoring radius.
//!
//! All densities are evaluated in log space first. `exp(-s^2 c)` underflows
//! long before the ratios the posterior needs become meaningless, so the
//! `ln_*` functions are the ones the rest of the crate builds on.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Prior N(ω₀, σ₀²) on the state and the source mixture
/// h·N(ω, σ_H²) + (1 − h)·N(ω, σ_L²) for a signal given the state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    prior_mean: f64,
    prior_var: f64,
    high_var: f64,
    low_var: f64,
    high_share: f64,
}

impl ModelParams {
    pub fn new(
        prior_mean: f64,
        prior_var: f64,
        high_var: f64,
        low_var: f64,
        high_share: f64,
    ) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        if !prior_mean.is_finite() {
            return Err(Error::InvalidParams(format!(
                "prior mean must be finite, got {prior_mean}"
            )));
        }
        positive("prior variance", prior_var)?;
        positive("high-quality variance", high_var)?;
        positive("low-quality variance", low_var)?;
        if !(0.0..=1.0).contains(&high_share) {
            return Err(Error::InvalidParams(format!(
                "high-quality share must lie in [0, 1], got {high_share}"
            )));
        }
        if high_var > low_var {
            return Err(Error::InvalidParams(format!(
                "high-quality variance {high_var} exceeds low-quality variance {low_var}"
            )));
        }
        Ok(Self {
            prior_mean,
            prior_var,
            high_var,
            low_var,
            high_share,
        })
    }

    /// ω₀ = 0, σ₀² = 1, σ_H² = 1/2, σ_L² = 3, h = 1/2.
    pub fn baseline() -> Self {
        Self {
            prior_mean: 0.0,
            prior_var: 1.0,
            high_var: 0.5,
            low_var: 3.0,
            high_share: 0.5,
        }
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }
    pub fn prior_var(&self) -> f64 {
        self.prior_var
    }
    pub fn high_var(&self) -> f64 {
        self.high_var
    }
    pub fn low_var(&self) -> f64 {
        self.low_var
    }
    pub fn high_share(&self) -> f64 {
        self.high_share
    }

    pub fn with_prior_mean(self, v: f64) -> Result<Self> {
        Self::new(v, self.prior_var, self.high_var, self.low_var, self.high_share)
    }
    pub fn with_prior_var(self, v: f64) -> Result<Self> {
        Self::new(self.prior_mean, v, self.high_var, self.low_var, self.high_share)
    }
    pub fn with_high_var(self, v: f64) -> Result<Self> {
        Self::new(self.prior_mean, self.prior_var, v, self.low_var, self.high_share)
    }
    pub fn with_low_var(self, v: f64) -> Result<Self> {
        Self::new(self.prior_mean, self.prior_var, self.high_var, v, self.high_share)
    }
    pub fn with_high_share(self, v: f64) -> Result<Self> {
        Self::new(self.prior_mean, self.prior_var, self.high_var, self.low_var, v)
    }

    pub fn noise_var(&self, q: Quality) -> f64 {
        match q {
            Quality::High => self.high_var,
            Quality::Low => self.low_var,
        }
    }

    /// Prior probability of a source of quality `q`.
    pub fn share(&self, q: Quality) -> f64 {
        match q {
            Quality::High => self.high_share,
            Quality::Low => 1.0 - self.high_share,
        }
    }

    /// ln of [`Self::share`]; `-inf` for an absent type.
    pub fn ln_share(&self, q: Quality) -> f64 {
        self.share(q).ln()
    }

    /// Standard deviation of the conjugate posterior of a high-quality signal,
    /// the narrowest feature any integrand in the model can have.
    pub(crate) fn finest_scale(&self) -> f64 {
        (self.prior_var * self.high_var / (self.prior_var + self.high_var)).sqrt()
    }

    /// Standard deviation of an un-censored signal from the noisiest source.
    pub(crate) fn widest_signal_sd(&self) -> f64 {
        (self.prior_var + self.low_var).sqrt()
    }

    /// Default upper end of the radius scan: ten ex-ante standard deviations
    /// of a low-quality signal.
    pub fn default_scan_bound(&self) -> f64 {
        10.0 * exante_signal_total_var(self, Quality::Low).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quality {
    High,
    Low,
}

impl Quality {
    pub const BOTH: [Quality; 2] = [Quality::High, Quality::Low];

    pub fn other(self) -> Self {
        match self {
            Quality::High => Quality::Low,
            Quality::Low => Quality::High,
        }
    }
}

/// Half-width of the sampled window around the prior mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Radius {
    Finite(f64),
    Unbounded,
}

impl Radius {
    /// Finite radius that truncated densities can use (`r > 0`).
    pub(crate) fn positive(self) -> Result<Option<f64>> {
        match self {
            Radius::Unbounded => Ok(None),
            Radius::Finite(r) if r.is_finite() && r > 0.0 => Ok(Some(r)),
            Radius::Finite(r) if r == f64::INFINITY => Ok(None),
            Radius::Finite(r) => Err(Error::DegenerateRadius(r)),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Radius::Finite(_))
    }
}

impl std::fmt::Display for Radius {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Variance of the normal sampling weight γ(s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SamplingVariance {
    Finite(f64),
    Unbounded,
}

impl SamplingVariance {
    pub(crate) fn positive(self) -> Result<Option<f64>> {
        match self {
            SamplingVariance::Unbounded => Ok(None),
            SamplingVariance::Finite(v) if v.is_finite() && v > 0.0 => Ok(Some(v)),
            SamplingVariance::Finite(v) => Err(Error::InvalidParams(format!(
                "sampling variance must be positive, got {v}"
            ))),
        }
    }
}

/// How the agent chooses which signals to sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SamplingPolicy {
    /// Hard window (ω₀ − r, ω₀ + r).
    Radius(Radius),
    /// Soft weight γ(s) = N(s; mean, var).
    NormalWeight { mean: f64, var: SamplingVariance },
}

impl SamplingPolicy {
    pub const UNCENSORED: SamplingPolicy = SamplingPolicy::Radius(Radius::Unbounded);

    pub fn radius(r: f64) -> Self {
        SamplingPolicy::Radius(Radius::Finite(r))
    }

    pub fn is_uncensored(&self) -> bool {
        matches!(
            self,
            SamplingPolicy::Radius(Radius::Unbounded)
                | SamplingPolicy::NormalWeight {
                    var: SamplingVariance::Unbounded,
                    ..
                }
        )
    }
}

// ---------------------------------------------------------------------------
// Gaussian primitives

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub(crate) fn ln_normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * d * d / var - 0.5 * var.ln() - LN_SQRT_2PI
}

/// Standard normal CDF.
pub(crate) fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// ln Φ(z), accurate far into the lower tail.
pub(crate) fn ln_std_normal_cdf(z: f64) -> f64 {
    if z > -35.0 {
        return std_normal_cdf(z).ln();
    }
    // Mills-ratio asymptotic series; relative error below 1e-12 past -35.
    let z2 = z * z;
    let inv = 1.0 / z2;
    let series = 1.0 - inv * (1.0 - 3.0 * inv * (1.0 - 5.0 * inv * (1.0 - 7.0 * inv)));
    -0.5 * z2 - (-z).ln() - LN_SQRT_2PI + series.ln()
}

/// ln(1 − e^x) for x ≤ 0.
pub(crate) fn ln_one_minus_exp(x: f64) -> f64 {
    if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// ln P(a < Z < b) for a standard normal Z.
pub(crate) fn ln_std_normal_interval(a: f64, b: f64) -> f64 {
    if b <= a {
        return f64::NEG_INFINITY;
    }
    if a >= 0.0 {
        return ln_std_normal_interval(-b, -a);
    }
    if b <= 0.0 {
        let hi = ln_std_normal_cdf(b);
        let lo = ln_std_normal_cdf(a);
        return hi + ln_one_minus_exp(lo - hi);
    }
    // a < 0 < b: the complement is two lower tails.
    (1.0 - std_normal_cdf(a) - std_normal_cdf(-b)).ln()
}

pub(crate) fn ln_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

// ---------------------------------------------------------------------------
// Signal densities

/// ln f_q(s | ω).
pub fn ln_component_density(s: f64, omega: f64, params: &ModelParams, q: Quality) -> f64 {
    ln_normal_pdf(s, omega, params.noise_var(q))
}

/// ln f(s | ω) for the two-type mixture.
pub fn ln_mixture_density(s: f64, omega: f64, params: &ModelParams) -> f64 {
    ln_add_exp(
        params.ln_share(Quality::High) + ln_component_density(s, omega, params, Quality::High),
        params.ln_share(Quality::Low) + ln_component_density(s, omega, params, Quality::Low),
    )
}

/// f(s | ω) = h·N(s; ω, σ_H²) + (1 − h)·N(s; ω, σ_L²).
pub fn mixture_density(s: f64, omega: f64, params: &ModelParams) -> f64 {
    ln_mixture_density(s, omega, params).exp()
}

/// F(x | ω), the mixture CDF.
pub fn mixture_cdf(x: f64, omega: f64, params: &ModelParams) -> f64 {
    Quality::BOTH
        .iter()
        .map(|&q| params.share(q) * std_normal_cdf((x - omega) / params.noise_var(q).sqrt()))
        .sum()
}

/// ln P(|s − ω₀| < r | ω, q) for a single source type.
pub fn ln_component_window_mass(omega: f64, r: f64, params: &ModelParams, q: Quality) -> f64 {
    let sd = params.noise_var(q).sqrt();
    let w0 = params.prior_mean;
    ln_std_normal_interval((w0 - r - omega) / sd, (w0 + r - omega) / sd)
}

/// ln [F(ω₀ + r | ω) − F(ω₀ − r | ω)].
pub fn ln_window_mass(omega: f64, r: f64, params: &ModelParams) -> f64 {
    ln_add_exp(
        params.ln_share(Quality::High)
            + ln_component_window_mass(omega, r, params, Quality::High),
        params.ln_share(Quality::Low) + ln_component_window_mass(omega, r, params, Quality::Low),
    )
}

/// ln T_r f(s | ω); `-inf` outside the window.
pub fn ln_truncated_density(s: f64, omega: f64, params: &ModelParams, radius: Radius) -> Result<f64> {
    match radius.positive()? {
        None => Ok(ln_mixture_density(s, omega, params)),
        Some(r) => {
            if (s - params.prior_mean).abs() >= r {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(ln_mixture_density(s, omega, params) - ln_window_mass(omega, r, params))
        }
    }
}

/// T_r f(s | ω): the mixture renormalised to the window (ω₀ − r, ω₀ + r).
pub fn truncated_density(s: f64, omega: f64, params: &ModelParams, radius: Radius) -> Result<f64> {
    ln_truncated_density(s, omega, params, radius).map(f64::exp)
}

/// Ex-ante (state-marginalised) signal distribution of one source type, with
/// the variance given by the harmonic combination σ₀²σ_q² / (σ₀² + σ_q²).
///
/// The harmonic form is the conjugate *posterior* variance. The variance of
/// s = ω + ε is σ₀² + σ_q² (see [`exante_signal_total_var`]); both orderings
/// agree (high < low), which is all the harmonic form is used for. Anything
/// quantitative in this crate uses the total variance.
pub fn exante_signal_params(params: &ModelParams, q: Quality) -> (f64, f64) {
    let v0 = params.prior_var;
    let vq = params.noise_var(q);
    (params.prior_mean, v0 * vq / (v0 + vq))
}

/// Var(s) = σ₀² + σ_q² for a type-q signal before censoring.
pub fn exante_signal_total_var(params: &ModelParams, q: Quality) -> f64 {
    params.prior_var + params.noise_var(q)
}

pub(crate) fn two_pi() -> f64 {
    2.0 * PI
}
