//! `optimize radius` and `optimize normal-sampling`.

use std::path::PathBuf;

use echo_chamber::censor::{optimize_radius, OptimumResult};
use echo_chamber::normal_sampling::optimize_sampling_variance;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_num, write_records};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Radius,
    NormalSampling,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Radius => "radius",
            Family::NormalSampling => "normal-sampling",
        }
    }

    fn variable(self) -> &'static str {
        match self {
            Family::Radius => "r_star",
            Family::NormalSampling => "sigma_gamma2_star",
        }
    }
}

pub fn optimize(cfg: &RunConfig, family: Family) -> Result<OptimumResult, CliError> {
    Ok(match family {
        Family::Radius => optimize_radius(&cfg.params, &cfg.numerics)?,
        Family::NormalSampling => optimize_sampling_variance(&cfg.params, &cfg.numerics)?,
    })
}

pub fn render(family: Family, o: &OptimumResult) -> String {
    let opt = o.optimum.map_or_else(|| "unbounded".to_string(), fmt_num);
    format!(
        "{} = {}\nutility at optimum = {}\nuncensored utility = {}\nfinite = {}\nbracket = [{}, {}]\n",
        family.variable(),
        opt,
        fmt_num(o.utility_at_opt),
        fmt_num(o.utility_uncensored),
        o.is_finite,
        fmt_num(o.bracket.0),
        fmt_num(o.bracket.1),
    )
}

pub fn write(cfg: &RunConfig, family: Family, o: &OptimumResult) -> Result<PathBuf, CliError> {
    let path = cfg.out.join(format!("optimize_{}.csv", family.name().replace('-', "_")));
    let rows = vec![
        vec![family.variable().to_string(), o.optimum.map_or_else(|| "unbounded".into(), fmt_num)],
        vec!["utility_at_opt".into(), fmt_num(o.utility_at_opt)],
        vec!["utility_uncensored".into(), fmt_num(o.utility_uncensored)],
        vec!["is_finite".into(), o.is_finite.to_string()],
        vec!["bracket_lo".into(), fmt_num(o.bracket.0)],
        vec!["bracket_hi".into(), fmt_num(o.bracket.1)],
    ];
    write_records(&path, cfg, &[], &["quantity".into(), "value".into()], &rows)?;
    Ok(path)
}
