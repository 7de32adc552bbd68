//! Posterior beliefs, source-quality probabilities and optimal actions.

use serde::{Deserialize, Serialize};

use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::law::{SignalLaw, StateGrid};
use crate::model::{ln_add_exp, ln_normal_pdf, ModelParams, Quality, SamplingPolicy};

/// Everything the agent knows after one signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    /// Posterior mean of the state by direct quadrature over the joint.
    pub action: f64,
    /// The same mean rebuilt as P(H|s)·a_H + P(L|s)·a_L.
    pub decomposed_action: f64,
    pub posterior_var: f64,
    pub prob_high: f64,
    /// Posterior means of the state given the signal and the source type.
    pub type_actions: (f64, f64),
}

impl PosteriorSummary {
    pub fn decomposition_residual(&self) -> f64 {
        (self.action - self.decomposed_action).abs()
    }
}

/// Reusable posterior machinery for one (params, policy) pair.
#[derive(Debug, Clone)]
pub struct Posterior {
    grid: StateGrid,
}

impl Posterior {
    pub fn new(params: &ModelParams, policy: &SamplingPolicy, cfg: &NumericsConfig) -> Result<Self> {
        cfg.validate()?;
        let law = SignalLaw::new(params, policy)?;
        Ok(Self {
            grid: StateGrid::new(&law, cfg),
        })
    }

    pub fn law(&self) -> &SignalLaw {
        self.grid.law()
    }

    pub fn action(&self, s: f64) -> Result<f64> {
        self.law().check_signal(s)?;
        Ok(self.grid.joint(s, &mut Vec::new()).mean())
    }

    pub fn summary(&self, s: f64) -> Result<PosteriorSummary> {
        self.law().check_signal(s)?;
        let mut buf = Vec::new();
        let joint = self.grid.joint(s, &mut buf);
        let p = self.law().params();
        let h = self.grid.component(s, Quality::High, &mut buf);
        let l = self.grid.component(s, Quality::Low, &mut buf);
        let lh = p.ln_share(Quality::High) + h.ln_mass;
        let ll = p.ln_share(Quality::Low) + l.ln_mass;
        let prob_high = (lh - ln_add_exp(lh, ll)).exp();
        let part = |w: f64, a: f64| if w == 0.0 { 0.0 } else { w * a };
        Ok(PosteriorSummary {
            action: joint.mean(),
            decomposed_action: part(prob_high, h.mean) + part(1.0 - prob_high, l.mean),
            posterior_var: joint.variance(),
            prob_high,
            type_actions: (h.mean, l.mean),
        })
    }

    pub fn prob_high(&self, s: f64) -> Result<f64> {
        Ok(self.summary(s)?.prob_high)
    }

    /// Posterior mean if every source were of type `q`.
    pub fn type_conditional_action(&self, s: f64, q: Quality) -> Result<f64> {
        self.law().check_signal(s)?;
        Ok(self.grid.single_type(s, q, &mut Vec::new()).mean)
    }

    pub fn density(&self, omega: f64, s: f64) -> Result<f64> {
        self.law().check_signal(s)?;
        let p = self.law().params();
        let marginal = self.grid.joint(s, &mut Vec::new()).ln_marginal();
        let ln = ln_normal_pdf(omega, p.prior_mean(), p.prior_var())
            + self.law().ln_density(s, omega)
            - marginal;
        Ok(ln.exp())
    }
}

/// Posterior density of the state at `omega` after signal `s`.
pub fn posterior_density(
    omega: f64,
    s: f64,
    policy: &SamplingPolicy,
    params: &ModelParams,
    cfg: &NumericsConfig,
) -> Result<f64> {
    Posterior::new(params, policy, cfg)?.density(omega, s)
}

/// ln P(H|s)/P(L|s) for an unrestricted signal.
pub fn ln_source_odds_closed(s: f64, params: &ModelParams) -> Result<f64> {
    let h = params.high_share();
    if h <= 0.0 || h >= 1.0 {
        return Err(Error::UndefinedOdds(h));
    }
    let v0 = params.prior_var();
    let (vh, vl) = (params.high_var() + v0, params.low_var() + v0);
    let d = s - params.prior_mean();
    Ok((h / (1.0 - h)).ln() + 0.5 * (vl / vh).ln()
        - d * d * (params.low_var() - params.high_var()) / (2.0 * vh * vl))
}

pub fn source_odds_closed(s: f64, params: &ModelParams) -> Result<f64> {
    ln_source_odds_closed(s, params).map(f64::exp)
}

pub fn prob_high_closed(s: f64, params: &ModelParams) -> Result<f64> {
    match params.high_share() {
        1.0 => Ok(1.0),
        0.0 => Ok(0.0),
        _ => {
            let lo = ln_source_odds_closed(s, params)?;
            Ok(1.0 / (1.0 + (-lo).exp()))
        }
    }
}

/// P(H|s) by quadrature under the given policy.
pub fn prob_high(
    s: f64,
    policy: &SamplingPolicy,
    params: &ModelParams,
    cfg: &NumericsConfig,
) -> Result<f64> {
    Posterior::new(params, policy, cfg)?.prob_high(s)
}

pub fn type_conditional_action(
    s: f64,
    policy: &SamplingPolicy,
    params: &ModelParams,
    q: Quality,
    cfg: &NumericsConfig,
) -> Result<f64> {
    Posterior::new(params, policy, cfg)?.type_conditional_action(s, q)
}

pub fn optimal_action(
    s: f64,
    policy: &SamplingPolicy,
    params: &ModelParams,
    cfg: &NumericsConfig,
) -> Result<PosteriorSummary> {
    Posterior::new(params, policy, cfg)?.summary(s)
}

pub fn uncensored_linear_action(s: f64, params: &ModelParams, q: Quality) -> f64 {
    let vq = params.noise_var(q);
    let v0 = params.prior_var();
    (vq * params.prior_mean() + v0 * s) / (vq + v0)
}
