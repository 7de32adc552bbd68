//! Run configuration. Precedence, lowest first: built-in defaults, config
//! file (flat `key=value` lines or a flat JSON object), command-line flags.

use std::path::{Path, PathBuf};

use echo_chamber::{ModelParams, NumericsConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Svg,
}

/// Raw, not yet validated settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub prior_mean: f64,
    pub prior_var: f64,
    pub high_var: f64,
    pub low_var: f64,
    pub high_share: f64,
    pub numerics: NumericsConfig,
    pub out: PathBuf,
    pub only: Option<Vec<String>>,
    pub formats: Vec<Format>,
    pub radius: Option<f64>,
}

impl Default for Settings {
    fn default() -> Self {
        let p = ModelParams::baseline();
        Self {
            prior_mean: p.prior_mean(),
            prior_var: p.prior_var(),
            high_var: p.high_var(),
            low_var: p.low_var(),
            high_share: p.high_share(),
            numerics: NumericsConfig::default(),
            out: PathBuf::from("out"),
            only: None,
            formats: vec![Format::Csv, Format::Svg],
            radius: None,
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("bad value for {key}: {v:?}")))
}

pub fn parse_list(v: &str) -> Vec<String> {
    v.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn parse_formats(v: &str) -> Result<Vec<Format>, CliError> {
    let mut out = Vec::new();
    for f in parse_list(v) {
        out.push(match f.to_ascii_lowercase().as_str() {
            "csv" => Format::Csv,
            "svg" => Format::Svg,
            other => return Err(CliError::Config(format!("unknown format {other:?}"))),
        });
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Config("at least one output format is required".into()));
    }
    Ok(out)
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let n = &mut self.numerics;
        match key.trim() {
            "omega0" | "prior_mean" => self.prior_mean = num(key, value)?,
            "sigma02" | "sigma0_2" | "prior_var" => self.prior_var = num(key, value)?,
            "sigmaH2" | "sigmaH_2" | "high_var" => self.high_var = num(key, value)?,
            "sigmaL2" | "sigmaL_2" | "low_var" => self.low_var = num(key, value)?,
            "h" | "high_share" => self.high_share = num(key, value)?,
            "support_halfwidth_sd" => n.support_halfwidth_sd = num(key, value)?,
            "quad_nodes" => n.quad_nodes = num(key, value)?,
            "abs_tol" => n.abs_tol = num(key, value)?,
            "invariant_tol" => n.invariant_tol = num(key, value)?,
            "radius_lo" => n.radius_grid.lo = num(key, value)?,
            "radius_hi" => n.radius_grid.hi = Some(num(key, value)?),
            "radius_steps" => n.radius_grid.steps = num(key, value)?,
            "refine_iters" => n.refine_iters = num(key, value)?,
            "seed" | "mc_seed" => n.mc_seed = num(key, value)?,
            "mc_n" => n.mc_n = num(key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "only" => self.only = Some(parse_list(value)),
            "format" => self.formats = parse_formats(value)?,
            "radius" => self.radius = Some(num(key, value)?),
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// `key=value,key=value`.
    pub fn apply_pairs(&mut self, pairs: &str) -> Result<(), CliError> {
        for item in parse_list(pairs) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("expected key=value, got {item:?}")))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        if text.trim_start().starts_with('{') {
            let obj: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            for (k, v) in obj {
                let v = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Array(items) => items
                        .iter()
                        .map(|i| i.as_str().map(str::to_string).unwrap_or_else(|| i.to_string()))
                        .collect::<Vec<_>>()
                        .join(","),
                    other => other.to_string(),
                };
                self.set(&k, &v)?;
            }
        } else {
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::Config(format!("{}: expected key=value, got {line:?}", path.display()))
                })?;
                self.set(k, v)?;
            }
        }
        Ok(())
    }

    pub fn build(self) -> Result<RunConfig, CliError> {
        let params = ModelParams::new(
            self.prior_mean,
            self.prior_var,
            self.high_var,
            self.low_var,
            self.high_share,
        )?;
        self.numerics.validate()?;
        if let Some(r) = self.radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(CliError::Config(format!("radius must be positive, got {r}")));
            }
        }
        Ok(RunConfig {
            params,
            numerics: self.numerics,
            out: self.out,
            only: self.only,
            formats: self.formats,
            radius: self.radius,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub numerics: NumericsConfig,
    pub out: PathBuf,
    pub only: Option<Vec<String>>,
    pub formats: Vec<Format>,
    pub radius: Option<f64>,
}

impl RunConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Every parameter and numerical setting on one line, for file headers.
    pub fn describe(&self) -> String {
        let p = &self.params;
        let n = &self.numerics;
        let hi = n
            .radius_grid
            .hi
            .map_or_else(|| "auto".to_string(), |v| v.to_string());
        format!(
            "echo-chamber {} omega0={} sigma02={} sigmaH2={} sigmaL2={} h={} \
             support_halfwidth_sd={} quad_nodes={} abs_tol={} invariant_tol={} \
             radius_lo={} radius_hi={} radius_steps={} refine_iters={} seed={} mc_n={}",
            crate::VERSION,
            p.prior_mean(),
            p.prior_var(),
            p.high_var(),
            p.low_var(),
            p.high_share(),
            n.support_halfwidth_sd,
            n.quad_nodes,
            n.abs_tol,
            n.invariant_tol,
            n.radius_grid.lo,
            hi,
            n.radius_grid.steps,
            n.refine_iters,
            n.mc_seed,
            n.mc_n,
        )
    }
}
