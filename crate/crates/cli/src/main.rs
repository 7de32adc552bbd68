use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use echo_chamber_cli::config::{parse_formats, parse_list, Settings};
use echo_chamber_cli::optimize::{self, Family};
use echo_chamber_cli::sweep::{sweep, SweepParam};
use echo_chamber_cli::{figures, verify, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "echo-chamber", version, about = "Rational echo chambers: figures, checks and optimizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args)]
struct Common {
    /// Model or numerics overrides, e.g. `sigmaL2=30,h=0.5`.
    #[arg(long, global = true)]
    params: Option<String>,
    /// Config file with `key=value` lines or a flat JSON object.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo draws per estimate.
    #[arg(long, global = true)]
    mc_n: Option<usize>,
    /// Comma-separated figure ids (figures) or check ids (verify).
    #[arg(long, global = true)]
    only: Option<String>,
    /// Comma-separated output formats: csv, svg.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the data (and plots) behind figures 1-5.
    Figures {
        /// Censoring radius for the censored curves of fig4 and fig5.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Run the verification suite; exits 1 if any check fails.
    Verify {
        /// Comma-separated check ids or id prefixes.
        #[arg(long)]
        check: Option<String>,
    },
    /// Search for the best censoring radius or sampling variance.
    Optimize {
        #[arg(value_enum)]
        family: FamilyArg,
    },
    /// Optimum over a grid of one parameter.
    Sweep {
        /// sigmaL2, h or sigma02.
        #[arg(long)]
        param: String,
        /// Comma-separated values.
        #[arg(long)]
        values: String,
        #[arg(long, value_enum, default_value = "radius")]
        family: FamilyArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Radius,
    NormalSampling,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Radius => Family::Radius,
            FamilyArg::NormalSampling => Family::NormalSampling,
        }
    }
}

fn settings(c: &Common, radius: Option<f64>) -> Result<Settings, CliError> {
    let mut s = Settings::default();
    if let Some(path) = &c.config {
        s.apply_file(path)?;
    }
    if let Some(p) = &c.params {
        s.apply_pairs(p)?;
    }
    if let Some(o) = &c.out {
        s.out = o.clone();
    }
    if let Some(seed) = c.seed {
        s.numerics.mc_seed = seed;
    }
    if let Some(n) = c.mc_n {
        s.numerics.mc_n = n;
    }
    if let Some(o) = &c.only {
        s.only = Some(parse_list(o));
    }
    if let Some(f) = &c.format {
        s.formats = parse_formats(f)?;
    }
    if radius.is_some() {
        s.radius = radius;
    }
    Ok(s)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Figures { radius } => {
            let cfg = settings(&cli.common, radius)?.build()?;
            let run = figures::run_figures(&cfg)?;
            for p in &run.written {
                println!("wrote {}", p.display());
            }
            for (id, e) in &run.failures {
                eprintln!("{id} failed: {e}");
            }
            if !run.failures.is_empty() {
                return Err(CliError::FiguresFailed(run.failures.len()));
            }
        }
        Command::Verify { check } => {
            let s = settings(&cli.common, None)?;
            let filter = check.as_deref().map(parse_list).or_else(|| s.only.clone());
            if let Some(f) = &filter {
                let ids = verify::check_ids();
                for w in f {
                    if !ids.iter().any(|id| id == w || id.starts_with(&format!("{w}_"))) {
                        return Err(CliError::Config(format!("unknown check {w:?}")));
                    }
                }
            }
            let cfg: RunConfig = s.build()?;
            let report = verify::run(&cfg, &filter);
            std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
            let path = cfg.out.join("verify.json");
            std::fs::write(&path, report.to_json()).map_err(|e| CliError::io(&path, e))?;
            print!("{}", report.summary());
            println!("report: {}", path.display());
            if report.failed > 0 {
                return Err(CliError::VerifyFailed {
                    failed: report.failed,
                    total: report.checks.len(),
                });
            }
        }
        Command::Optimize { family } => {
            let cfg = settings(&cli.common, None)?.build()?;
            let family = Family::from(family);
            let o = optimize::optimize(&cfg, family)?;
            print!("{}", optimize::render(family, &o));
            let path = optimize::write(&cfg, family, &o)?;
            println!("wrote {}", path.display());
        }
        Command::Sweep { param, values, family } => {
            let cfg = settings(&cli.common, None)?.build()?;
            let param = SweepParam::parse(&param)?;
            let values = parse_list(&values)
                .iter()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| CliError::Config(format!("bad sweep value {v:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let path = sweep(&cfg, param, &values, family.into())?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("echo-chamber: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
