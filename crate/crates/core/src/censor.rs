//! Expected utility of a censoring radius and the search for the best one.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::NumericsConfig;
use crate::error::{Error, Result};
use crate::law::{SignalLaw, StateGrid};
use crate::model::{ModelParams, Radius, SamplingPolicy};
use crate::search::{log_grid, optimize_against_unbounded};

pub use crate::search::OptimumResult;

/// U over a set of radii. The first entry is `Finite(0)` and the last is
/// `Unbounded`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityCurve {
    pub radii: Vec<Radius>,
    pub utilities: Vec<f64>,
    pub params: ModelParams,
}

impl UtilityCurve {
    pub fn uncensored(&self) -> f64 {
        *self.utilities.last().expect("curve is never empty")
    }
}

/// Per-signal posterior sums weighted by the signal quadrature, in signal
/// order. Entry: (s, weight·marginal, posterior mean, posterior variance).
pub(crate) fn signal_table(grid: &StateGrid, cfg: &NumericsConfig) -> Vec<(f64, f64, f64, f64)> {
    let rule = grid.law().signal_rule(cfg);
    rule.nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map_init(Vec::new, |buf, (&s, &w)| {
            let j = grid.joint(s, buf);
            (s, w * j.ln_marginal().exp(), j.mean(), j.variance())
        })
        .collect()
}

/// −E[(ω − a(s))²] under the joint law of (ω, s). `action = None` uses the
/// posterior mean.
pub(crate) fn utility_with_action(
    law: &SignalLaw,
    cfg: &NumericsConfig,
    action: Option<&(dyn Fn(f64) -> f64 + Sync)>,
) -> Result<f64> {
    let grid = StateGrid::new(law, cfg);
    let table = signal_table(&grid, cfg);
    let mut mass = 0.0;
    let mut loss = 0.0;
    for &(s, m, mean, var) in &table {
        let gap = action.map_or(0.0, |a| mean - a(s));
        mass += m;
        loss += m * (var + gap * gap);
    }
    check_mass(mass, cfg)?;
    Ok(-loss / mass)
}

fn check_mass(mass: f64, cfg: &NumericsConfig) -> Result<()> {
    let tolerance = 100.0 * cfg.abs_tol;
    let deviation = (mass - 1.0).abs();
    if deviation > tolerance || !mass.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            deviation,
            tolerance,
        });
    }
    Ok(())
}

/// Expected utility of sampling within `radius` and acting optimally.
pub fn expected_utility(radius: Radius, params: &ModelParams, cfg: &NumericsConfig) -> Result<f64> {
    cfg.validate()?;
    if radius == Radius::Finite(0.0) {
        return Ok(-params.prior_var());
    }
    let law = SignalLaw::new(params, &SamplingPolicy::Radius(radius))?;
    utility_with_action(&law, cfg, None)
}

/// U at `Finite(0)`, at each radius in `radii`, and at `Unbounded`.
pub fn utility_curve(params: &ModelParams, radii: &[f64], cfg: &NumericsConfig) -> Result<UtilityCurve> {
    let mut all = vec![Radius::Finite(0.0)];
    all.extend(radii.iter().map(|&r| Radius::Finite(r)));
    all.push(Radius::Unbounded);
    let utilities = all
        .iter()
        .map(|&r| expected_utility(r, params, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(UtilityCurve {
        radii: all,
        utilities,
        params: *params,
    })
}

/// The configured log-spaced scan points.
pub fn scan_radii(params: &ModelParams, cfg: &NumericsConfig) -> Vec<f64> {
    let g = &cfg.radius_grid;
    log_grid(g.lo, g.upper(params), g.steps)
}

pub fn optimize_radius(params: &ModelParams, cfg: &NumericsConfig) -> Result<OptimumResult> {
    let u_inf = expected_utility(Radius::Unbounded, params, cfg)?;
    optimize_against_unbounded(
        |r| expected_utility(Radius::Finite(r), params, cfg),
        &scan_radii(params, cfg),
        u_inf,
        cfg.invariant_tol,
        cfg.refine_iters,
    )
}

/// Variance of the received signal and its correlation with the state.
pub fn signal_moments_vs_r(params: &ModelParams, radius: Radius, cfg: &NumericsConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let law = SignalLaw::new(params, &SamplingPolicy::Radius(radius))?;
    let grid = StateGrid::new(&law, cfg);
    let table = signal_table(&grid, cfg);
    let (mut m, mut es, mut ess, mut ew, mut eww, mut esw) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for &(s, w, mean, var) in &table {
        m += w;
        es += w * s;
        ess += w * s * s;
        ew += w * mean;
        eww += w * (var + mean * mean);
        esw += w * s * mean;
    }
    check_mass(m, cfg)?;
    let (es, ess, ew, eww, esw) = (es / m, ess / m, ew / m, eww / m, esw / m);
    let vs = (ess - es * es).max(0.0);
    let vw = (eww - ew * ew).max(0.0);
    let cov = esw - es * ew;
    let corr = if vs > 0.0 && vw > 0.0 {
        (cov / (vs * vw).sqrt()).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    Ok((vs, corr))
}

/// E[a*(s, r) | ω] for each state in `omegas`.
pub fn expected_action_curve(
    omegas: &[f64],
    radius: Radius,
    params: &ModelParams,
    cfg: &NumericsConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let law = SignalLaw::new(params, &SamplingPolicy::Radius(radius))?;
    let grid = StateGrid::new(&law, cfg);
    let rule = law.signal_rule(cfg);
    let table = signal_table(&grid, cfg);
    Ok(omegas
        .iter()
        .map(|&omega| {
            let (mut num, mut den) = (0.0, 0.0);
            for ((&w, &(s, _, a, _)), _) in rule.weights.iter().zip(&table).zip(&rule.nodes) {
                let d = w * law.ln_density(s, omega).exp();
                num += d * a;
                den += d;
            }
            num / den
        })
        .collect())
}

pub fn expected_action_given_state(
    omega: f64,
    radius: Radius,
    params: &ModelParams,
    cfg: &NumericsConfig,
) -> Result<f64> {
    Ok(expected_action_curve(&[omega], radius, params, cfg)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_radius_is_prior_variance() {
        let p = ModelParams::baseline();
        let u = expected_utility(Radius::Finite(0.0), &p, &NumericsConfig::default()).unwrap();
        assert_eq!(u, -1.0);
    }

    #[test]
    fn single_type_uncensored_is_conjugate() {
        let p = ModelParams::baseline().with_high_share(1.0).unwrap();
        let u = expected_utility(Radius::Unbounded, &p, &NumericsConfig::default()).unwrap();
        assert_abs_diff_eq!(u, -1.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn negative_radius_rejected() {
        let p = ModelParams::baseline();
        let e = expected_utility(Radius::Finite(-1.0), &p, &NumericsConfig::default());
        assert!(matches!(e, Err(Error::DegenerateRadius(_))));
    }
}
