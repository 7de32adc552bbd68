//! The signal law induced by a sampling policy, and the state-space
//! quadrature every posterior computation in the crate runs on.
//!
//! Both policies act the same way on the likelihood: the agent receives
//! γ(s)·f(s|ω) / c(ω), where γ is the sampling weight (an indicator of the
//! window for a radius, a normal density for soft sampling) and
//! c(ω) = ∫ γ(s) f(s|ω) ds. The state-dependent normaliser c(ω) is what makes
//! censoring informative about the state.

use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::model::{
    ln_add_exp, ln_component_density, ln_component_window_mass, ln_normal_pdf, ln_window_mass,
    two_pi, ModelParams, Quality, SamplingPolicy,
};
use crate::quad::{GaussLegendre, Rule};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Window {
    Open,
    Radius(f64),
    Normal { mean: f64, var: f64 },
}

#[derive(Debug, Clone)]
pub struct SignalLaw {
    params: ModelParams,
    window: Window,
}

impl SignalLaw {
    pub fn new(params: &ModelParams, policy: &SamplingPolicy) -> Result<Self> {
        let window = match *policy {
            SamplingPolicy::Radius(r) => match r.positive()? {
                None => Window::Open,
                Some(r) => Window::Radius(r),
            },
            SamplingPolicy::NormalWeight { mean, var } => {
                if !mean.is_finite() {
                    return Err(Error::InvalidParams(format!(
                        "sampling mean must be finite, got {mean}"
                    )));
                }
                match var.positive()? {
                    None => Window::Open,
                    Some(v) => Window::Normal { mean, var: v },
                }
            }
        };
        Ok(Self {
            params: *params,
            window,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn is_open(&self) -> bool {
        self.window == Window::Open
    }

    /// Finite censoring radius, if any.
    pub fn radius(&self) -> Option<f64> {
        match self.window {
            Window::Radius(r) => Some(r),
            _ => None,
        }
    }

    pub fn contains(&self, s: f64) -> bool {
        match self.window {
            Window::Radius(r) => (s - self.params.prior_mean()).abs() < r,
            _ => s.is_finite(),
        }
    }

    pub fn check_signal(&self, s: f64) -> Result<()> {
        if self.contains(s) {
            return Ok(());
        }
        Err(Error::SignalOutsideSupport {
            signal: s,
            center: self.params.prior_mean(),
            radius: self.radius().unwrap_or(f64::INFINITY),
        })
    }

    /// ln γ(s).
    pub fn ln_weight(&self, s: f64) -> f64 {
        match self.window {
            Window::Open => 0.0,
            Window::Radius(_) => {
                if self.contains(s) {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Window::Normal { mean, var } => ln_normal_pdf(s, mean, var),
        }
    }

    /// ln c_q(ω) = ln ∫ γ(s) f_q(s|ω) ds.
    pub fn ln_norm_single(&self, omega: f64, q: Quality) -> f64 {
        match self.window {
            Window::Open => 0.0,
            Window::Radius(r) => ln_component_window_mass(omega, r, &self.params, q),
            Window::Normal { mean, var } => {
                ln_normal_pdf(omega, mean, var + self.params.noise_var(q))
            }
        }
    }

    /// ln c(ω) for the mixture.
    pub fn ln_norm(&self, omega: f64) -> f64 {
        match self.window {
            Window::Open => 0.0,
            Window::Radius(r) => ln_window_mass(omega, r, &self.params),
            Window::Normal { .. } => ln_add_exp(
                self.params.ln_share(Quality::High) + self.ln_norm_single(omega, Quality::High),
                self.params.ln_share(Quality::Low) + self.ln_norm_single(omega, Quality::Low),
            ),
        }
    }

    /// ln of the received-signal density γ(s) f(s|ω) / c(ω).
    pub fn ln_density(&self, s: f64, omega: f64) -> f64 {
        let w = self.ln_weight(s);
        if w == f64::NEG_INFINITY {
            return w;
        }
        let p = &self.params;
        let f = ln_add_exp(
            p.ln_share(Quality::High) + ln_component_density(s, omega, p, Quality::High),
            p.ln_share(Quality::Low) + ln_component_density(s, omega, p, Quality::Low),
        );
        w + f - self.ln_norm(omega)
    }

    /// Integration breaks and finest feature scale for the received signal.
    pub fn signal_breaks(&self, cfg: &NumericsConfig) -> (Vec<f64>, f64) {
        let p = &self.params;
        let c = cfg.support_halfwidth_sd;
        let w0 = p.prior_mean();
        let open = c * p.widest_signal_sd();
        match self.window {
            Window::Open => (vec![w0 - open, w0 + open], p.finest_scale()),
            Window::Radius(r) => {
                let half = r.min(open);
                (vec![w0 - half, w0 + half], p.finest_scale().min(r))
            }
            Window::Normal { mean, var } => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                let mut scale = p.finest_scale();
                for q in Quality::BOTH {
                    let vq = p.noise_var(q);
                    let lambda = var / (var + vq);
                    let cond_var = var * vq / (var + vq);
                    let center = lambda * w0 + (1.0 - lambda) * mean;
                    let sd = (lambda * lambda * p.prior_var() + cond_var).sqrt();
                    lo = lo.min(center - c * sd);
                    hi = hi.max(center + c * sd);
                    scale = scale.min(cond_var.sqrt());
                }
                (vec![lo, hi], scale)
            }
        }
    }

    pub fn signal_rule(&self, cfg: &NumericsConfig) -> Rule {
        let (breaks, scale) = self.signal_breaks(cfg);
        Rule::composite(&breaks, scale, &GaussLegendre::new(cfg.quad_nodes))
    }
}

/// ω-quadrature with everything that does not depend on the signal cached:
/// ln(weight · μ₀(ω)) and the normalisers ln c(ω), ln c_q(ω).
#[derive(Debug, Clone)]
pub struct StateGrid {
    law: SignalLaw,
    omega: Vec<f64>,
    ln_base: Vec<f64>,
    ln_norm: Vec<f64>,
    ln_norm_single: [Vec<f64>; 2],
}

/// Unnormalised sums of the joint posterior over states for one signal.
/// Every sum is scaled by e^{-ln_scale}.
#[derive(Debug, Clone, Copy)]
pub struct JointSlice {
    pub ln_scale: f64,
    pub mass: f64,
    pub first: f64,
    /// Σ (ω − a*)² over the posterior, a* = first / mass.
    pub central: f64,
}

impl JointSlice {
    pub fn mean(&self) -> f64 {
        self.first / self.mass
    }

    pub fn variance(&self) -> f64 {
        self.central / self.mass
    }

    /// ln ∫ γ(s) f(s|ω)/c(ω) μ₀(ω) dω, the marginal density of the signal.
    pub fn ln_marginal(&self) -> f64 {
        self.ln_scale + self.mass.ln()
    }
}

/// Posterior pieces of one source type, normalised within that type.
#[derive(Debug, Clone, Copy)]
pub struct ComponentSlice {
    /// ln ∫ f_q(s|ω)/c(ω) μ₀(ω) dω (without the share or γ(s)).
    pub ln_mass: f64,
    pub mean: f64,
}

fn qi(q: Quality) -> usize {
    match q {
        Quality::High => 0,
        Quality::Low => 1,
    }
}

impl StateGrid {
    pub fn new(law: &SignalLaw, cfg: &NumericsConfig) -> Self {
        let p = law.params();
        let half = cfg.support_halfwidth_sd * p.prior_var().sqrt();
        let w0 = p.prior_mean();
        let rule = Rule::composite(
            &[w0 - half, w0 + half],
            p.finest_scale(),
            &GaussLegendre::new(cfg.quad_nodes),
        );
        let ln_base = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&w, &wt)| wt.ln() + ln_normal_pdf(w, w0, p.prior_var()))
            .collect();
        let ln_norm = rule.nodes.iter().map(|&w| law.ln_norm(w)).collect();
        let ln_norm_single = Quality::BOTH.map(|q| {
            rule.nodes
                .iter()
                .map(|&w| law.ln_norm_single(w, q))
                .collect::<Vec<_>>()
        });
        Self {
            law: law.clone(),
            omega: rule.nodes,
            ln_base,
            ln_norm,
            ln_norm_single,
        }
    }

    pub fn law(&self) -> &SignalLaw {
        &self.law
    }

    pub fn states(&self) -> &[f64] {
        &self.omega
    }

    /// Joint posterior of the state under the mixture, for signal `s`.
    /// `buf` is scratch space reused across calls.
    pub fn joint(&self, s: f64, buf: &mut Vec<f64>) -> JointSlice {
        let p = self.law.params();
        let (lh, ll) = (p.ln_share(Quality::High), p.ln_share(Quality::Low));
        let (vh, vl) = (p.high_var(), p.low_var());
        let (ch, cl) = (lh - 0.5 * (two_pi() * vh).ln(), ll - 0.5 * (two_pi() * vl).ln());
        let (ih, il) = (0.5 / vh, 0.5 / vl);
        buf.clear();
        let mut m = f64::NEG_INFINITY;
        for k in 0..self.omega.len() {
            let d = s - self.omega[k];
            let base = self.ln_base[k] - self.ln_norm[k];
            let th = base + ch - d * d * ih;
            let tl = base + cl - d * d * il;
            m = m.max(th).max(tl);
            buf.push(th);
            buf.push(tl);
        }
        let mut mass = 0.0;
        let mut first = 0.0;
        for k in 0..self.omega.len() {
            let e = (buf[2 * k] - m).exp() + (buf[2 * k + 1] - m).exp();
            buf[2 * k] = e;
            mass += e;
            first += e * self.omega[k];
        }
        let a = first / mass;
        let central = (0..self.omega.len())
            .map(|k| {
                let d = self.omega[k] - a;
                buf[2 * k] * d * d
            })
            .sum();
        JointSlice {
            ln_scale: m + self.law.ln_weight(s),
            mass,
            first,
            central,
        }
    }

    /// Posterior of the state given the signal and the source type, inside
    /// the mixture model (normaliser c(ω)).
    pub fn component(&self, s: f64, q: Quality, buf: &mut Vec<f64>) -> ComponentSlice {
        self.component_with(s, q, &self.ln_norm, buf)
    }

    /// Posterior of the state if every source were of type `q`
    /// (normaliser c_q(ω)).
    pub fn single_type(&self, s: f64, q: Quality, buf: &mut Vec<f64>) -> ComponentSlice {
        self.component_with(s, q, &self.ln_norm_single[qi(q)], buf)
    }

    fn component_with(
        &self,
        s: f64,
        q: Quality,
        ln_norm: &[f64],
        buf: &mut Vec<f64>,
    ) -> ComponentSlice {
        let v = self.law.params().noise_var(q);
        buf.clear();
        buf.extend(
            (0..self.omega.len())
                .map(|k| self.ln_base[k] - ln_norm[k] + ln_normal_pdf(s, self.omega[k], v)),
        );
        let m = buf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut mass = 0.0;
        let mut first = 0.0;
        for (t, &w) in buf.iter().zip(&self.omega) {
            let e = (t - m).exp();
            mass += e;
            first += e * w;
        }
        ComponentSlice {
            ln_mass: m + mass.ln(),
            mean: first / mass,
        }
    }
}
