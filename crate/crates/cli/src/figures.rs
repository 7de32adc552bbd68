//! Data behind the five figures.

use std::path::PathBuf;

use echo_chamber::censor::{expected_action_curve, expected_utility, optimize_radius, signal_moments_vs_r};
use echo_chamber::inference::Posterior;
use echo_chamber::model::{mixture_density, ln_component_density};
use echo_chamber::{Quality, Radius, SamplingPolicy};

type Result<T> = echo_chamber::Result<T>;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{fmt_num, write_csv, write_svg, Table};

pub const FIGURES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

/// Radius used for censored curves when the optimum is unbounded and no
/// radius was given.
pub const FALLBACK_RADIUS: f64 = 2.35;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn total_sd(cfg: &RunConfig) -> f64 {
    (cfg.params.prior_var() + cfg.params.low_var()).sqrt()
}

/// Signal densities at the prior-mean state.
pub fn fig1(cfg: &RunConfig) -> Result<Table> {
    let p = &cfg.params;
    let w0 = p.prior_mean();
    let half = 4.0 * p.low_var().sqrt();
    let rows = linspace(w0 - half, w0 + half, 401)
        .into_iter()
        .map(|s| {
            let fh = ln_component_density(s, w0, p, Quality::High).exp();
            let fl = ln_component_density(s, w0, p, Quality::Low).exp();
            let h = p.high_share();
            vec![Some(s), Some(fh), Some(fl), Some(h * fh), Some((1.0 - h) * fl), Some(mixture_density(s, w0, p))]
        })
        .collect();
    Ok(Table {
        name: "fig1".into(),
        title: "Density of signals by source type".into(),
        notes: vec![format!("state fixed at omega = {}", fmt_num(w0))],
        columns: ["s", "f_H", "f_L", "h_f_H", "l_f_L", "f_mix"].map(String::from).to_vec(),
        rows,
    })
}

pub fn fig2(cfg: &RunConfig) -> Result<Table> {
    let p = &cfg.params;
    let u_inf = expected_utility(Radius::Unbounded, p, &cfg.numerics)?;
    let rows = linspace(0.0, 3.0 * total_sd(cfg), 121)
        .into_iter()
        .map(|r| {
            let u = expected_utility(Radius::Finite(r), p, &cfg.numerics)?;
            Ok(vec![Some(r), Some(u), Some(u_inf)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        name: "fig2".into(),
        title: "Expected utility as a function of censoring radius".into(),
        notes: vec![],
        columns: ["r", "EU_censored", "EU_uncensored"].map(String::from).to_vec(),
        rows,
    })
}

pub fn fig3(cfg: &RunConfig) -> Result<Table> {
    let p = &cfg.params;
    let hi = 3.0 * total_sd(cfg);
    let rows = (1..=120)
        .map(|k| {
            let r = hi * k as f64 / 120.0;
            let (v, c) = signal_moments_vs_r(p, Radius::Finite(r), &cfg.numerics)?;
            Ok(vec![Some(r), Some(v), Some(c)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        name: "fig3".into(),
        title: "Signal variance and correlation with the state".into(),
        notes: vec![],
        columns: ["r", "signal_var", "state_corr"].map(String::from).to_vec(),
        rows,
    })
}

pub fn fig4(cfg: &RunConfig, radius: f64, note: &str) -> Result<Table> {
    let p = &cfg.params;
    let n = &cfg.numerics;
    let unc = Posterior::new(p, &SamplingPolicy::UNCENSORED, n)?;
    let cen = Posterior::new(p, &SamplingPolicy::radius(radius), n)?;
    let w0 = p.prior_mean();
    let rows = linspace(w0 - 8.0, w0 + 8.0, 321)
        .into_iter()
        .map(|s| {
            let u = unc.summary(s)?;
            let mut row = vec![
                Some(s),
                Some(u.action),
                None,
                Some(unc.type_conditional_action(s, Quality::High)?),
                Some(unc.type_conditional_action(s, Quality::Low)?),
                None,
                None,
                Some(u.prob_high),
            ];
            if cen.law().contains(s) {
                row[2] = Some(cen.action(s)?);
                row[5] = Some(cen.type_conditional_action(s, Quality::High)?);
                row[6] = Some(cen.type_conditional_action(s, Quality::Low)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        name: "fig4".into(),
        title: "Optimal action as a function of signal".into(),
        notes: vec![note.to_string()],
        columns: ["s", "a_uncensored", "a_censored", "aH_unc", "aL_unc", "aH_cen", "aL_cen", "pH"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

pub fn fig5(cfg: &RunConfig, radius: f64, note: &str) -> Result<Table> {
    let p = &cfg.params;
    let w0 = p.prior_mean();
    let omegas = linspace(w0 - 5.0, w0 + 5.0, 201);
    let cen = expected_action_curve(&omegas, Radius::Finite(radius), p, &cfg.numerics)?;
    let unc = expected_action_curve(&omegas, Radius::Unbounded, p, &cfg.numerics)?;
    let rows = omegas
        .iter()
        .zip(cen.iter().zip(&unc))
        .map(|(&w, (&c, &u))| vec![Some(w), Some(c), Some(u)])
        .collect();
    Ok(Table {
        name: "fig5".into(),
        title: "Expected action as a function of state".into(),
        notes: vec![note.to_string()],
        columns: ["omega", "ea_r_star", "ea_uncensored"].map(String::from).to_vec(),
        rows,
    })
}

/// The radius for censored curves and a note describing where it came from.
pub fn display_radius(cfg: &RunConfig) -> Result<(f64, String)> {
    if let Some(r) = cfg.radius {
        return Ok((r, format!("censoring radius {} (given)", fmt_num(r))));
    }
    let o = optimize_radius(&cfg.params, &cfg.numerics)?;
    Ok(match o.optimum {
        Some(r) => (r, format!("censoring radius {} (optimal)", fmt_num(r))),
        None => (
            FALLBACK_RADIUS,
            format!(
                "optimal radius is unbounded at these parameters; censored curves use r = {}",
                fmt_num(FALLBACK_RADIUS)
            ),
        ),
    })
}

pub fn selected(cfg: &RunConfig) -> std::result::Result<Vec<&'static str>, CliError> {
    match &cfg.only {
        None => Ok(FIGURES.to_vec()),
        Some(ids) => ids
            .iter()
            .map(|id| {
                FIGURES
                    .iter()
                    .find(|f| **f == id.as_str())
                    .copied()
                    .ok_or_else(|| CliError::Config(format!("unknown figure {id:?}")))
            })
            .collect(),
    }
}

pub struct FigureRun {
    pub written: Vec<PathBuf>,
    pub failures: Vec<(String, echo_chamber::Error)>,
}

/// Builds and writes each selected figure. A numerical failure skips that
/// figure only.
pub fn run_figures(cfg: &RunConfig) -> std::result::Result<FigureRun, CliError> {
    let ids = selected(cfg)?;
    let mut radius: Option<Result<(f64, String)>> = None;
    let mut run = FigureRun {
        written: vec![],
        failures: vec![],
    };
    for id in ids {
        let table = match id {
            "fig1" => fig1(cfg),
            "fig2" => fig2(cfg),
            "fig3" => fig3(cfg),
            _ => {
                let r = radius.get_or_insert_with(|| display_radius(cfg)).clone();
                r.and_then(|(r, note)| if id == "fig4" { fig4(cfg, r, &note) } else { fig5(cfg, r, &note) })
            }
        };
        match table {
            Ok(t) => {
                if cfg.wants(Format::Csv) {
                    run.written.push(write_csv(&t, cfg, &cfg.out)?);
                }
                if cfg.wants(Format::Svg) {
                    run.written.push(write_svg(&t, &cfg.out)?);
                }
            }
            Err(e) => run.failures.push((id.to_string(), e)),
        }
    }
    Ok(run)
}
