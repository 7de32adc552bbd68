//! Soft echo chamber: signals weighted by a normal density γ(s) instead of
//! a hard window.
//!
//! With γ = N(ω_γ, σ_γ²), a type-q signal received at state ω is normal with
//! mean λ_q ω + (1 − λ_q) ω_γ and variance σ_γq², where
//! λ_q = σ_γ²/(σ_γ² + σ_q²) and σ_γq² = 1/(σ_γ⁻² + σ_q⁻²). The agent puts
//! weight α_q = σ₀⁻²/(σ₀⁻² + σ_γ⁻² + σ_q⁻²) on the prior mean.

use serde::{Deserialize, Serialize};

use crate::censor::utility_with_action;
use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::inference::prob_high_closed;
use crate::law::SignalLaw;
use crate::model::{ModelParams, Quality, SamplingPolicy, SamplingVariance};
use crate::search::{log_grid, optimize_against_unbounded, OptimumResult};

pub const VARIANCE_SCAN: (f64, f64) = (1e-3, 1e4);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightBundle {
    pub alpha_h: f64,
    pub alpha_l: f64,
    pub lambda_h: f64,
    pub lambda_l: f64,
    pub sig_gq_h: f64,
    pub sig_gq_l: f64,
    /// h·λ_H + (1 − h)·λ_L.
    pub lambda_bar: f64,
    /// h·α_H + (1 − h)·α_L; see [`WeightBundle::alpha_bar_at`] for the
    /// signal-dependent version.
    pub alpha_bar: f64,
}

impl WeightBundle {
    pub fn new(params: &ModelParams, var: SamplingVariance) -> Result<Self> {
        let var = var.positive()?;
        let p0 = 1.0 / params.prior_var();
        let one = |q: Quality| {
            let vq = params.noise_var(q);
            match var {
                None => (p0 / (p0 + 1.0 / vq), 1.0, vq),
                Some(v) => (
                    p0 / (p0 + 1.0 / v + 1.0 / vq),
                    v / (v + vq),
                    1.0 / (1.0 / v + 1.0 / vq),
                ),
            }
        };
        let (alpha_h, lambda_h, sig_gq_h) = one(Quality::High);
        let (alpha_l, lambda_l, sig_gq_l) = one(Quality::Low);
        let h = params.high_share();
        Ok(Self {
            alpha_h,
            alpha_l,
            lambda_h,
            lambda_l,
            sig_gq_h,
            sig_gq_l,
            lambda_bar: h * lambda_h + (1.0 - h) * lambda_l,
            alpha_bar: h * alpha_h + (1.0 - h) * alpha_l,
        })
    }

    pub fn alpha(&self, q: Quality) -> f64 {
        match q {
            Quality::High => self.alpha_h,
            Quality::Low => self.alpha_l,
        }
    }

    pub fn lambda(&self, q: Quality) -> f64 {
        match q {
            Quality::High => self.lambda_h,
            Quality::Low => self.lambda_l,
        }
    }

    /// σ_γq², the variance of a received type-q signal around its mean.
    pub fn conv_var(&self, q: Quality) -> f64 {
        match q {
            Quality::High => self.sig_gq_h,
            Quality::Low => self.sig_gq_l,
        }
    }

    pub fn conv_mean(&self, omega: f64, center: f64, q: Quality) -> f64 {
        let l = self.lambda(q);
        l * omega + (1.0 - l) * center
    }

    pub fn alpha_bar_at(&self, prob_high: f64) -> f64 {
        prob_high * self.alpha_h + (1.0 - prob_high) * self.alpha_l
    }
}

/// Mean and variance of a type-q signal received at state `omega`.
pub fn sampled_signal_distribution(
    omega: f64,
    params: &ModelParams,
    center: f64,
    var: SamplingVariance,
    q: Quality,
) -> Result<(f64, f64)> {
    let w = WeightBundle::new(params, var)?;
    Ok((w.conv_mean(omega, center, q), w.conv_var(q)))
}

/// The printed closed-form utility of normal sampling centred on the prior
/// mean, with the quality weight on α fixed at the prior share.
pub fn closed_form_objective(params: &ModelParams, var: SamplingVariance) -> Result<f64> {
    let w = WeightBundle::new(params, var)?;
    let h = params.high_share();
    let v0 = params.prior_var();
    let ab = 1.0 - w.alpha_bar;
    let first = (1.0 - ab * w.lambda_bar).powi(2) * v0;
    let spread = h * (1.0 - h) * ab * ab * (w.lambda_h - w.lambda_l).powi(2) * v0;
    let noise = ab * ab * (h * w.sig_gq_h + (1.0 - h) * w.sig_gq_l);
    Ok(-(first + spread + noise))
}

/// Utility when every source is of type `q` and γ is centred at `center`.
pub fn single_type_objective(
    params: &ModelParams,
    q: Quality,
    var: SamplingVariance,
    center: f64,
) -> Result<f64> {
    let w = WeightBundle::new(params, var)?;
    let (a, l) = (w.alpha(q), w.lambda(q));
    let shift = params.prior_mean() - center;
    Ok(-((1.0 - (1.0 - a) * l).powi(2) * params.prior_var()
        + (1.0 - a).powi(2) * w.conv_var(q)
        + (1.0 - l).powi(2) * shift * shift))
}

/// σ₀²(σ_q² − 2σ₀²)/(σ_q² + σ₀²): where the single-type objective is flat.
pub fn single_type_critical_point(params: &ModelParams, q: Quality) -> f64 {
    let (v0, vq) = (params.prior_var(), params.noise_var(q));
    v0 * (vq - 2.0 * v0) / (vq + v0)
}

fn centred(params: &ModelParams, var: SamplingVariance) -> SamplingPolicy {
    SamplingPolicy::NormalWeight {
        mean: params.prior_mean(),
        var,
    }
}

/// Utility of the linear rule a(s) = ᾱ(s)ω₀ + (1 − ᾱ(s))s, with ᾱ(s) built
/// from the closed-form source odds, integrated over the received-signal law.
pub fn quadrature_objective(params: &ModelParams, var: SamplingVariance, cfg: &NumericsConfig) -> Result<f64> {
    cfg.validate()?;
    let w = WeightBundle::new(params, var)?;
    let law = SignalLaw::new(params, &centred(params, var))?;
    let w0 = params.prior_mean();
    let p = *params;
    let action = move |s: f64| {
        let ph = prob_high_closed(s, &p).unwrap_or(p.high_share());
        let ab = w.alpha_bar_at(ph);
        ab * w0 + (1.0 - ab) * s
    };
    utility_with_action(&law, cfg, Some(&action))
}

/// Utility of acting on the exact posterior mean under normal sampling.
pub fn bayes_objective(params: &ModelParams, var: SamplingVariance, cfg: &NumericsConfig) -> Result<f64> {
    cfg.validate()?;
    let law = SignalLaw::new(params, &centred(params, var))?;
    utility_with_action(&law, cfg, None)
}

pub fn variance_scan(cfg: &NumericsConfig) -> Vec<f64> {
    log_grid(VARIANCE_SCAN.0, VARIANCE_SCAN.1, cfg.radius_grid.steps)
}

/// Best sampling variance for [`quadrature_objective`], against σ_γ² = ∞.
pub fn optimize_sampling_variance(params: &ModelParams, cfg: &NumericsConfig) -> Result<OptimumResult> {
    let u_inf = quadrature_objective(params, SamplingVariance::Unbounded, cfg)?;
    optimize_against_unbounded(
        |v| quadrature_objective(params, SamplingVariance::Finite(v), cfg),
        &variance_scan(cfg),
        u_inf,
        cfg.invariant_tol,
        cfg.refine_iters,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterCheck {
    pub offset: f64,
    pub centred: f64,
    pub shifted_up: f64,
    pub shifted_down: f64,
    /// centred − max(shifted).
    pub margin: f64,
    pub dominates: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterReport {
    pub sampling_var: f64,
    pub checks: Vec<CenterCheck>,
    pub all_dominate: bool,
}

/// Compares centring γ at ω₀ with centring it at ω₀ ± offset, single type.
pub fn sampling_center_check(params: &ModelParams, var: f64, offsets: &[f64]) -> Result<CenterReport> {
    let q = match params.high_share() {
        1.0 => Quality::High,
        0.0 => Quality::Low,
        h => {
            return Err(Error::InvalidParams(format!(
                "centre check needs a single source type, got h = {h}"
            )))
        }
    };
    let v = SamplingVariance::Finite(var);
    let w0 = params.prior_mean();
    let centred = single_type_objective(params, q, v, w0)?;
    let checks = offsets
        .iter()
        .map(|&offset| {
            let up = single_type_objective(params, q, v, w0 + offset)?;
            let down = single_type_objective(params, q, v, w0 - offset)?;
            let margin = centred - up.max(down);
            Ok(CenterCheck {
                offset,
                centred,
                shifted_up: up,
                shifted_down: down,
                margin,
                dominates: margin >= 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let all_dominate = checks.iter().all(|c| c.dominates);
    Ok(CenterReport {
        sampling_var: var,
        checks,
        all_dominate,
    })
}
