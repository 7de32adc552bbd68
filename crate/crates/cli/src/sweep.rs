//! Parameter sweeps producing a long-format CSV.

use std::path::PathBuf;

use echo_chamber::ModelParams;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::optimize::{optimize, Family};
use crate::output::{fmt_num, write_records};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    LowVar,
    HighShare,
    PriorVar,
}

impl SweepParam {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "sigmaL2" | "low_var" => Ok(SweepParam::LowVar),
            "h" | "high_share" => Ok(SweepParam::HighShare),
            "sigma02" | "prior_var" => Ok(SweepParam::PriorVar),
            other => Err(CliError::Config(format!(
                "cannot sweep {other:?}; choose sigmaL2, h or sigma02"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::LowVar => "sigmaL2",
            SweepParam::HighShare => "h",
            SweepParam::PriorVar => "sigma02",
        }
    }

    fn apply(self, p: ModelParams, v: f64) -> echo_chamber::Result<ModelParams> {
        match self {
            SweepParam::LowVar => p.with_low_var(v),
            SweepParam::HighShare => p.with_high_share(v),
            SweepParam::PriorVar => p.with_prior_var(v),
        }
    }
}

/// Optimum of `family` at each value; rows are (param, value, quantity, result).
pub fn sweep(cfg: &RunConfig, param: SweepParam, values: &[f64], family: Family) -> Result<PathBuf, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let mut rows = Vec::new();
    for &v in values {
        let point = RunConfig {
            params: param.apply(cfg.params, v)?,
            ..cfg.clone()
        };
        let o = optimize(&point, family)?;
        let mut push = |q: &str, r: String| rows.push(vec![param.name().to_string(), fmt_num(v), q.to_string(), r]);
        push("optimum", o.optimum.map_or_else(String::new, fmt_num));
        push("utility_at_opt", fmt_num(o.utility_at_opt));
        push("utility_uncensored", fmt_num(o.utility_uncensored));
        push("is_finite", o.is_finite.to_string());
    }
    let path = cfg.out.join(format!("sweep_{}_{}.csv", param.name(), family.name().replace('-', "_")));
    let note = format!("family {}; blank optimum means unbounded", family.name());
    let cols = ["param", "value", "quantity", "result"].map(String::from);
    write_records(&path, cfg, &[note], &cols, &rows)?;
    Ok(path)
}
