//! The verification suite: one named check per model result. Each check
//! records what it measured, the tolerance and the seed; errors inside a
//! check mark it failed instead of aborting the run.

use serde::Serialize;

use echo_chamber::censor::{expected_action_curve, expected_utility, optimize_radius};
use echo_chamber::inference::{prob_high_closed, Posterior};
use echo_chamber::mc::{mc_expected_utility, mc_high_prob_within_radius, simulate_draws, ActionTable};
use echo_chamber::normal_sampling::{
    closed_form_objective, optimize_sampling_variance, sampling_center_check, single_type_critical_point,
};
use echo_chamber::{Error, ModelParams, NumericsConfig, Quality, Radius, Result, SamplingPolicy, SamplingVariance};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Measure {
    pub name: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub id: String,
    pub claim: String,
    pub pass: bool,
    pub measured: Vec<Measure>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub params: ModelParams,
    pub numerics: NumericsConfig,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            let m: Vec<String> = c
                .measured
                .iter()
                .map(|m| match m.value {
                    Some(v) => format!("{}={}", m.name, crate::output::fmt_num(v)),
                    None => format!("{}=none", m.name),
                })
                .collect();
            out.push_str(&format!("[{tag}] {}: {}\n       {}\n", c.id, c.claim, m.join(" ")));
            if let Some(e) = &c.error {
                out.push_str(&format!("       error: {e}\n"));
            }
        }
        out.push_str(&format!("{} passed, {} failed\n", self.passed, self.failed));
        out
    }
}

struct Outcome {
    pass: bool,
    measured: Vec<Measure>,
    tolerance: Option<f64>,
}

fn m(name: &str, value: f64) -> Measure {
    Measure {
        name: name.into(),
        value: Some(value),
    }
}

fn m_opt(name: &str, value: Option<f64>) -> Measure {
    Measure {
        name: name.into(),
        value,
    }
}

type CheckFn = fn(&RunConfig) -> Result<Outcome>;

struct Spec {
    id: &'static str,
    claim: &'static str,
    seeded: bool,
    run: CheckFn,
}

const CHECKS: &[Spec] = &[
    Spec { id: "lemma1", claim: "optimal action equals the quality-weighted mix of type-conditional actions", seeded: false, run: lemma1 },
    Spec { id: "lemma2", claim: "a single high-quality source type is worth more than a mixture", seeded: false, run: lemma2 },
    Spec { id: "lemma3", claim: "type-conditional actions increase strictly in the signal", seeded: false, run: lemma3 },
    Spec { id: "lemma5", claim: "closed-form source odds match quadrature and fall with distance from the prior mean", seeded: false, run: lemma5 },
    Spec { id: "lemma5_radius_independence", claim: "quality belief does not depend on the censoring radius", seeded: false, run: lemma5_radius },
    Spec { id: "prop1", claim: "share of high-quality sources near the prior mean rises as low-quality noise grows", seeded: true, run: prop1 },
    Spec { id: "prop2", claim: "a finite optimal radius exists once low-quality noise exceeds a threshold", seeded: false, run: prop2 },
    Spec { id: "prop2_radius_value", claim: "optimal radius is 2.35 +/- 0.1 and beats no censoring", seeded: false, run: prop2_value },
    Spec { id: "prop3", claim: "the optimal action at s = 1 falls as the radius widens (2, 4, unbounded)", seeded: false, run: prop3 },
    Spec { id: "prop4", claim: "uncensored action has an interior local maximum in the signal at sigmaL2 = 30", seeded: false, run: prop4 },
    Spec { id: "prop5_variance_ratio", claim: "near-equal source variances: unbounded optimum and linear action", seeded: false, run: prop5_ratio },
    Spec { id: "prop5_share", claim: "near-certain high quality: unbounded optimum and linear action", seeded: false, run: prop5_share },
    Spec { id: "uds", claim: "single-type posterior mean moves in the direction of the signal", seeded: false, run: uds },
    Spec { id: "prior_variance", claim: "single-type action grows in magnitude with the prior variance", seeded: false, run: prior_variance },
    Spec { id: "high_type_vanishes", claim: "high-type contribution to the action vanishes for distant signals", seeded: false, run: high_type_vanishes },
    Spec { id: "normal_critical_point", claim: "single-type normal-sampling objective has one critical point, a local minimum", seeded: false, run: normal_critical },
    Spec { id: "normal_center", claim: "centring the sampling weight on the prior mean is optimal for a single type", seeded: false, run: normal_center },
    Spec { id: "normal_threshold", claim: "finite normal-sampling variance is optimal once low-quality noise exceeds a threshold", seeded: false, run: normal_threshold },
    Spec { id: "normal_corollary", claim: "without quality uncertainty normal sampling cannot beat uniform sampling", seeded: false, run: normal_corollary },
    Spec { id: "mc_oracle", claim: "quadrature expected utilities match seeded Monte Carlo within 3 standard errors", seeded: true, run: mc_oracle },
    Spec { id: "fig5_crossing", claim: "expected-action curves for the optimal radius and no censoring cross for a state in (2, 3)", seeded: false, run: fig5_crossing },
];

pub fn check_ids() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.id).collect()
}

fn selected(filter: &Option<Vec<String>>, id: &str) -> bool {
    match filter {
        None => true,
        Some(f) => f
            .iter()
            .any(|w| id == w || id.starts_with(&format!("{w}_"))),
    }
}

pub fn run(cfg: &RunConfig, filter: &Option<Vec<String>>) -> Report {
    let checks: Vec<Check> = CHECKS
        .iter()
        .filter(|c| selected(filter, c.id))
        .map(|c| {
            let seed = c.seeded.then_some(cfg.numerics.mc_seed);
            match (c.run)(cfg) {
                Ok(o) => Check {
                    id: c.id.into(),
                    claim: c.claim.into(),
                    pass: o.pass,
                    measured: o.measured,
                    tolerance: o.tolerance,
                    seed,
                    error: None,
                },
                Err(e) => Check {
                    id: c.id.into(),
                    claim: c.claim.into(),
                    pass: false,
                    measured: vec![],
                    tolerance: None,
                    seed,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let passed = checks.iter().filter(|c| c.pass).count();
    Report {
        version: crate::VERSION.into(),
        params: cfg.params,
        numerics: cfg.numerics.clone(),
        failed: checks.len() - passed,
        passed,
        checks,
    }
}

// ---------------------------------------------------------------------------
// helpers

fn grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step).round() as usize;
    (0..=n).map(|i| a + step * i as f64).collect()
}

fn coarse(cfg: &NumericsConfig) -> NumericsConfig {
    let mut c = cfg.clone();
    c.radius_grid.steps = c.radius_grid.steps.min(40);
    c.refine_iters = c.refine_iters.min(25);
    c
}

fn radius_is_finite(p: &ModelParams, cfg: &NumericsConfig) -> Result<bool> {
    match optimize_radius(p, cfg) {
        Ok(o) => Ok(o.is_finite),
        Err(Error::ScanBoundTooSmall { .. }) => Ok(true),
        Err(e) => Err(e),
    }
}

fn sampling_is_finite(p: &ModelParams, cfg: &NumericsConfig) -> Result<bool> {
    match optimize_sampling_variance(p, cfg) {
        Ok(o) => Ok(o.is_finite),
        Err(Error::ScanBoundTooSmall { .. }) => Ok(true),
        Err(e) => Err(e),
    }
}

/// Smallest low-quality variance in `[lo, hi]` where `pred` turns true,
/// by bisection in log space. `None` if `pred(hi)` is false.
fn threshold(lo: f64, hi: f64, iters: usize, pred: impl Fn(f64) -> Result<bool>) -> Result<Option<f64>> {
    if !pred(hi)? {
        return Ok(None);
    }
    if pred(lo)? {
        return Ok(Some(lo));
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..iters {
        let mid = 0.5 * (a + b);
        if pred(mid.exp())? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(Some(b.exp()))
}

fn has_interior_peak(ys: &[f64]) -> bool {
    (1..ys.len().saturating_sub(1)).any(|i| ys[i] > ys[i - 1] && ys[i] > ys[i + 1])
}

fn uncensored_actions(p: &ModelParams, cfg: &NumericsConfig, xs: &[f64]) -> Result<Vec<f64>> {
    let post = Posterior::new(p, &SamplingPolicy::UNCENSORED, cfg)?;
    xs.iter().map(|&s| post.action(s)).collect()
}

/// Largest residual from the least-squares line through the points.
fn linearity_deviation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = sxy / sxx;
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (y - (my + b * (x - mx))).abs())
        .fold(0.0, f64::max)
}

fn radii() -> [Radius; 5] {
    [
        Radius::Finite(0.5),
        Radius::Finite(1.0),
        Radius::Finite(2.0),
        Radius::Finite(4.0),
        Radius::Unbounded,
    ]
}

// ---------------------------------------------------------------------------
// checks

fn lemma1(cfg: &RunConfig) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for r in radii() {
        let post = Posterior::new(&cfg.params, &SamplingPolicy::Radius(r), &cfg.numerics)?;
        for d in grid(-6.0, 6.0, 0.25) {
            let s = cfg.params.prior_mean() + d;
            if post.law().contains(s) {
                worst = worst.max(post.summary(s)?.decomposition_residual());
            }
        }
    }
    let tol = cfg.numerics.invariant_tol;
    Ok(Outcome { pass: worst < tol, measured: vec![m("max_residual", worst)], tolerance: Some(tol) })
}

fn lemma2(cfg: &RunConfig) -> Result<Outcome> {
    let single = cfg.params.with_high_share(1.0)?;
    let other_h = if cfg.params.high_share() == 1.0 { 0.5 } else { cfg.params.high_share() };
    let mixed = cfg.params.with_high_share(other_h)?;
    let us = expected_utility(Radius::Unbounded, &single, &cfg.numerics)?;
    let um = expected_utility(Radius::Unbounded, &mixed, &cfg.numerics)?;
    let gap = us - um;
    let informative = cfg.params.low_var() > cfg.params.high_var();
    Ok(Outcome {
        pass: if informative { gap > 0.0 } else { gap.abs() < 1e-9 },
        measured: vec![m("utility_single_type", us), m("utility_mixed", um), m("mixed_share", other_h), m("gap", gap)],
        tolerance: Some(0.0),
    })
}

fn lemma3(cfg: &RunConfig) -> Result<Outcome> {
    let mut min_step = f64::INFINITY;
    for r in radii() {
        let post = Posterior::new(&cfg.params, &SamplingPolicy::Radius(r), &cfg.numerics)?;
        for q in Quality::BOTH {
            let mut prev: Option<f64> = None;
            for d in grid(-6.0, 6.0, 0.1) {
                let s = cfg.params.prior_mean() + d;
                if !post.law().contains(s) {
                    continue;
                }
                let a = post.type_conditional_action(s, q)?;
                if let Some(p) = prev {
                    min_step = min_step.min(a - p);
                }
                prev = Some(a);
            }
        }
    }
    Ok(Outcome { pass: min_step > 0.0, measured: vec![m("min_increment", min_step)], tolerance: Some(0.0) })
}

fn lemma5(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let post = Posterior::new(p, &SamplingPolicy::UNCENSORED, &cfg.numerics)?;
    let mut worst = 0.0f64;
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for d in grid(-6.0, 6.0, 0.25) {
        let s = p.prior_mean() + d;
        worst = worst.max((post.prob_high(s)? - prob_high_closed(s, p)?).abs());
    }
    for d in grid(0.0, 6.0, 0.25) {
        let ph = prob_high_closed(p.prior_mean() + d, p)?;
        let informative = p.low_var() > p.high_var() && p.high_share() > 0.0 && p.high_share() < 1.0;
        if informative && ph >= prev {
            monotone = false;
        }
        prev = ph;
    }
    let tol = 1e-6;
    Ok(Outcome {
        pass: worst < tol && monotone,
        measured: vec![
            m("p_high_at_0", prob_high_closed(p.prior_mean(), p)?),
            m("p_high_at_2", prob_high_closed(p.prior_mean() + 2.0, p)?),
            m("max_closed_vs_quadrature", worst),
        ],
        tolerance: Some(tol),
    })
}

fn lemma5_radius(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let mut worst = 0.0f64;
    for r in [2.0, 4.0] {
        let post = Posterior::new(p, &SamplingPolicy::radius(r), &cfg.numerics)?;
        for d in [0.0, 0.5, 1.0, 1.5] {
            let s = p.prior_mean() + d;
            worst = worst.max((post.prob_high(s)? - prob_high_closed(s, p)?).abs());
        }
    }
    let tol = cfg.numerics.invariant_tol;
    Ok(Outcome { pass: worst < tol, measured: vec![m("max_gap_to_uncensored", worst)], tolerance: Some(tol) })
}

fn prop1(cfg: &RunConfig) -> Result<Outcome> {
    let n = &cfg.numerics;
    let ladder = [3.0, 48.0, 768.0];
    let est = ladder
        .iter()
        .map(|&l| mc_high_prob_within_radius(&cfg.params.with_low_var(l)?, 1.0, n.mc_n, n.mc_seed))
        .collect::<Result<Vec<_>>>()?;
    let rising = est.windows(2).all(|w| {
        let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
        w[1].value - w[0].value > 3.0 * se
    });
    let mut measured = Vec::new();
    for (l, e) in ladder.iter().zip(&est) {
        measured.push(m(&format!("p_high_sigmaL2_{l}"), e.value));
        measured.push(m(&format!("se_sigmaL2_{l}"), e.std_error));
    }
    Ok(Outcome { pass: rising, measured, tolerance: Some(3.0) })
}

fn prop2(cfg: &RunConfig) -> Result<Outcome> {
    let c = coarse(&cfg.numerics);
    let p = cfg.params;
    let lo = p.high_var() * 1.0001;
    let nu = threshold(lo, 1000.0f64.max(lo * 2.0), 10, |l| radius_is_finite(&p.with_low_var(l)?, &c))?;
    Ok(Outcome { pass: nu.is_some(), measured: vec![m_opt("sigmaL2_threshold", nu)], tolerance: None })
}

fn prop2_value(cfg: &RunConfig) -> Result<Outcome> {
    let o = optimize_radius(&cfg.params, &cfg.numerics)?;
    let pass = o.optimum.is_some_and(|r| (r - 2.35).abs() <= 0.1) && o.utility_at_opt > o.utility_uncensored;
    Ok(Outcome {
        pass,
        measured: vec![
            m_opt("r_star", o.optimum),
            m("utility_at_opt", o.utility_at_opt),
            m("utility_uncensored", o.utility_uncensored),
        ],
        tolerance: Some(0.1),
    })
}

fn prop3(cfg: &RunConfig) -> Result<Outcome> {
    let s = cfg.params.prior_mean() + 1.0;
    let act = |pol| Posterior::new(&cfg.params, &pol, &cfg.numerics)?.action(s);
    let a2 = act(SamplingPolicy::radius(2.0))?;
    let a4 = act(SamplingPolicy::radius(4.0))?;
    let ai = act(SamplingPolicy::UNCENSORED)?;
    let tol = 1e-4;
    Ok(Outcome {
        pass: a2 - a4 > tol && a4 - ai > tol,
        measured: vec![m("a_r2", a2), m("a_r4", a4), m("a_unbounded", ai)],
        tolerance: Some(tol),
    })
}

fn prop4(cfg: &RunConfig) -> Result<Outcome> {
    let base = cfg.params;
    let w0 = base.prior_mean();
    let xs: Vec<f64> = grid(0.0, 8.0, 0.05).into_iter().map(|d| w0 + d).collect();
    let p30 = base.with_low_var(30.0)?;
    let ys = uncensored_actions(&p30, &cfg.numerics, &xs)?;
    let peak = has_interior_peak(&ys);
    let post = Posterior::new(&p30, &SamplingPolicy::UNCENSORED, &cfg.numerics)?;
    let bar = threshold(base.high_var() * 1.0001, 30.0f64.max(base.high_var() * 2.0), 12, |l| {
        Ok(has_interior_peak(&uncensored_actions(&base.with_low_var(l)?, &cfg.numerics, &xs)?))
    })?;
    Ok(Outcome {
        pass: peak,
        measured: vec![
            m("a_at_2", post.action(w0 + 2.0)?),
            m("a_at_3", post.action(w0 + 3.0)?),
            m_opt("sigmaL2_threshold", bar),
        ],
        tolerance: None,
    })
}

fn prop5_case(cfg: &RunConfig, p: ModelParams) -> Result<Outcome> {
    let o = optimize_radius(&p, &cfg.numerics)?;
    let xs: Vec<f64> = grid(-4.0, 4.0, 0.1).into_iter().map(|d| p.prior_mean() + d).collect();
    let ys = uncensored_actions(&p, &cfg.numerics, &xs)?;
    let dev = linearity_deviation(&xs, &ys);
    let tol = 1e-3;
    Ok(Outcome {
        pass: !o.is_finite && dev < tol,
        measured: vec![m_opt("r_star", o.optimum), m("max_linearity_deviation", dev)],
        tolerance: Some(tol),
    })
}

fn prop5_ratio(cfg: &RunConfig) -> Result<Outcome> {
    prop5_case(cfg, cfg.params.with_low_var(1.01 * cfg.params.high_var())?)
}

fn prop5_share(cfg: &RunConfig) -> Result<Outcome> {
    prop5_case(cfg, cfg.params.with_high_share(0.999)?)
}

fn uds(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let post = Posterior::new(p, &SamplingPolicy::UNCENSORED, &cfg.numerics)?;
    let mut ok = true;
    for q in Quality::BOTH {
        for d in [-3.0, -1.0, -0.2, 0.2, 1.0, 3.0] {
            let a = post.type_conditional_action(p.prior_mean() + d, q)? - p.prior_mean();
            ok &= a.signum() == f64::signum(d);
        }
    }
    Ok(Outcome { pass: ok, measured: vec![], tolerance: None })
}

fn prior_variance(cfg: &RunConfig) -> Result<Outcome> {
    let p = cfg.params;
    let wide = p.with_prior_var(2.0 * p.prior_var())?;
    let a = Posterior::new(&p, &SamplingPolicy::UNCENSORED, &cfg.numerics)?;
    let b = Posterior::new(&wide, &SamplingPolicy::UNCENSORED, &cfg.numerics)?;
    let mut min_gain = f64::INFINITY;
    for q in Quality::BOTH {
        for d in [-2.0, 1.0, 3.0] {
            let s = p.prior_mean() + d;
            let x = (a.type_conditional_action(s, q)? - p.prior_mean()).abs();
            let y = (b.type_conditional_action(s, q)? - p.prior_mean()).abs();
            min_gain = min_gain.min(y - x);
        }
    }
    Ok(Outcome { pass: min_gain > 0.0, measured: vec![m("min_gain", min_gain)], tolerance: Some(0.0) })
}

fn high_type_vanishes(cfg: &RunConfig) -> Result<Outcome> {
    let p = &cfg.params;
    let a = Posterior::new(p, &SamplingPolicy::UNCENSORED, &cfg.numerics)?.summary(p.prior_mean() + 10.0)?;
    let v = a.prob_high * (a.type_actions.0 - p.prior_mean()).abs();
    Ok(Outcome { pass: v < 1e-6, measured: vec![m("contribution_at_10", v)], tolerance: Some(1e-6) })
}

fn normal_critical(_cfg: &RunConfig) -> Result<Outcome> {
    let p = ModelParams::new(0.0, 1.0, 4.0, 4.0, 1.0)?;
    let c = single_type_critical_point(&p, Quality::High);
    let f = |v: f64| closed_form_objective(&p, SamplingVariance::Finite(v));
    let d = 1e-4;
    let slope = (f(c + d)? - f(c - d)?) / (2.0 * d);
    let is_min = f(c + d)? > f(c)? && f(c - d)? > f(c)?;
    let low = f(1e-12)?;
    let high = closed_form_objective(&p, SamplingVariance::Unbounded)?;
    let tol = 1e-6;
    Ok(Outcome {
        pass: (c - 0.4).abs() < tol && is_min && slope.abs() < tol && (low + 1.0).abs() < tol && (high + 0.8).abs() < tol,
        measured: vec![m("critical_point", c), m("slope_at_critical", slope), m("limit_zero", low), m("limit_unbounded", high)],
        tolerance: Some(tol),
    })
}

fn normal_center(_cfg: &RunConfig) -> Result<Outcome> {
    let p = ModelParams::new(0.0, 1.0, 0.5, 0.5, 1.0)?;
    let r = sampling_center_check(&p, 1.0, &[0.5, 1.0, 2.0])?;
    let margin1 = r.checks[1].margin;
    Ok(Outcome {
        pass: r.all_dominate && (margin1 - 1.0 / 9.0).abs() < 1e-12,
        measured: r.checks.iter().map(|c| m(&format!("margin_offset_{}", c.offset), c.margin)).collect(),
        tolerance: Some(1e-12),
    })
}

fn normal_threshold(cfg: &RunConfig) -> Result<Outcome> {
    let c = coarse(&cfg.numerics);
    let p = cfg.params;
    let kappa = threshold(p.high_var() * 1.0001, 300.0f64.max(p.high_var() * 2.0), 8, |l| {
        sampling_is_finite(&p.with_low_var(l)?, &c)
    })?;
    Ok(Outcome { pass: kappa.is_some(), measured: vec![m_opt("sigmaL2_threshold", kappa)], tolerance: None })
}

fn normal_corollary(cfg: &RunConfig) -> Result<Outcome> {
    let c = coarse(&cfg.numerics);
    let p = cfg.params;
    let same = p.with_low_var(p.high_var())?;
    let single = p.with_high_share(1.0)?;
    let a = optimize_sampling_variance(&same, &c)?;
    let b = optimize_sampling_variance(&single, &c)?;
    Ok(Outcome {
        pass: !a.is_finite && !b.is_finite,
        measured: vec![m_opt("equal_variances_optimum", a.optimum), m_opt("single_type_optimum", b.optimum)],
        tolerance: None,
    })
}

/// Radii compared against Monte Carlo in the oracle check.
pub fn oracle_radii(cfg: &RunConfig) -> Result<Vec<Radius>> {
    let mut out = vec![Radius::Finite(1.0), Radius::Finite(2.35), Radius::Unbounded];
    if let Some(r) = optimize_radius(&cfg.params, &cfg.numerics)?.optimum {
        out.push(Radius::Finite(r));
    }
    Ok(out)
}

fn mc_oracle(cfg: &RunConfig) -> Result<Outcome> {
    let n = &cfg.numerics;
    let mut worst = 0.0f64;
    let mut measured = Vec::new();
    for r in oracle_radii(cfg)? {
        let pol = SamplingPolicy::Radius(r);
        let q = expected_utility(r, &cfg.params, n)?;
        let table = ActionTable::new(&cfg.params, &pol, n, ActionTable::DEFAULT_POINTS)?;
        let draws = simulate_draws(&cfg.params, &pol, n.mc_n, n.mc_seed)?;
        let e = mc_expected_utility(&draws, |s| table.action(s));
        let z = e.z_score(q);
        worst = worst.max(z);
        let tag = match r {
            Radius::Finite(v) => crate::output::fmt_num(v),
            Radius::Unbounded => "unbounded".into(),
        };
        measured.push(m(&format!("quadrature_r_{tag}"), q));
        measured.push(m(&format!("mc_r_{tag}"), e.value));
        measured.push(m(&format!("z_r_{tag}"), z));
    }
    Ok(Outcome { pass: worst < 3.0, measured, tolerance: Some(3.0) })
}

/// First state in (ω₀, ω₀ + 5] where the censored curve drops below the
/// uncensored one.
pub fn crossing_state(p: &ModelParams, r: f64, cfg: &NumericsConfig) -> Result<Option<f64>> {
    let w0 = p.prior_mean();
    let xs: Vec<f64> = grid(0.05, 5.0, 0.05).into_iter().map(|d| w0 + d).collect();
    let c = expected_action_curve(&xs, Radius::Finite(r), p, cfg)?;
    let u = expected_action_curve(&xs, Radius::Unbounded, p, cfg)?;
    let d: Vec<f64> = c.iter().zip(&u).map(|(a, b)| a - b).collect();
    for i in 1..d.len() {
        if d[i - 1] > 0.0 && d[i] <= 0.0 {
            let t = d[i - 1] / (d[i - 1] - d[i]);
            return Ok(Some(xs[i - 1] + t * (xs[i] - xs[i - 1]) - w0));
        }
    }
    Ok(None)
}

fn fig5_crossing(cfg: &RunConfig) -> Result<Outcome> {
    let o = optimize_radius(&cfg.params, &cfg.numerics)?;
    let cross = match o.optimum {
        Some(r) => crossing_state(&cfg.params, r, &cfg.numerics)?,
        None => None,
    };
    Ok(Outcome {
        pass: cross.is_some_and(|x| x > 2.0 && x < 3.0),
        measured: vec![m_opt("r_star", o.optimum), m_opt("crossing_offset", cross)],
        tolerance: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_matches_prefix_groups() {
        let f = Some(vec!["prop5".to_string()]);
        assert!(selected(&f, "prop5_share"));
        assert!(selected(&f, "prop5_variance_ratio"));
        assert!(!selected(&f, "prop4"));
        assert!(selected(&None, "lemma1"));
    }

    #[test]
    fn linearity_of_line_is_zero() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!(linearity_deviation(&xs, &ys) < 1e-12);
    }

    #[test]
    fn ids_unique() {
        let mut ids = check_ids();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), CHECKS.len());
    }
}
