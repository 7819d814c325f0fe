//! Command-line front door: parse a config, dispatch the requested run,
//! write the report, and translate verdicts into the process exit code.
//!
//! Exit codes: 0 when every verdict holds (possibly within noise), 2 when
//! any instance is violated, 3 when any is inconclusive but none violated,
//! 1 for usage and config errors.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bounds::BoundError;
use crate::certifier::search::search_extremal;
use crate::certifier::suites::{run_classical_suite, run_cw_suite, run_theorem1_suite};
use crate::certifier::tightness::tightness_exponential;
use crate::certifier::{fit_empirical_constant, CertifyError, VerdictCounts};
use crate::config::{Command, ConfigError, ExperimentConfig, ReportFormat};
use crate::report::{plot_margins, plot_search, plot_tightness, ReportError, ReportFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Parser)]
#[command(
    name = "remez-lab",
    version,
    about = "Empirical certification of integral and sup-norm Remez-type inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Certify the restricted-norm lower bound on a randomized grid
    VerifyTheorem1(RunArgs),
    /// Certify the level-set small-ball bound on the same grid
    VerifyCw(RunArgs),
    /// Certify sup-norm bounds over subinterval unions
    VerifyClassical(RunArgs),
    /// Audit the monomial family t^d on the exponential law in closed form
    Tightness(RunArgs),
    /// Hill-climb for ratio-extremal instances
    SearchExtremal(RunArgs),
    /// Fit the smallest constant the restricted-norm data supports
    FitConstant(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (TOML); defaults apply when omitted
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master seed; overrides the config key
    #[arg(long)]
    seed: Option<u64>,
    /// Bound constant; overrides the config key
    #[arg(long)]
    c: Option<f64>,
    /// Report destination; stdout when omitted
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Report format
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    /// Zero all clocks so reports are byte-identical across runs
    #[arg(long)]
    fixed_clock: bool,
    /// Monte-Carlo cloud size per cell; overrides the config key
    #[arg(long)]
    samples: Option<usize>,
    /// Also write a deterministic SVG plot here
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let (command, args) = match cli.command {
        Sub::VerifyTheorem1(a) => (Command::VerifyTheorem1, a),
        Sub::VerifyCw(a) => (Command::VerifyCw, a),
        Sub::VerifyClassical(a) => (Command::VerifyClassical, a),
        Sub::Tightness(a) => (Command::Tightness, a),
        Sub::SearchExtremal(a) => (Command::SearchExtremal, a),
        Sub::FitConstant(a) => (Command::FitConstant, a),
    };
    match execute(command, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn exit_code(counts: &VerdictCounts) -> i32 {
    if counts.violated > 0 {
        2
    } else if counts.inconclusive > 0 {
        3
    } else {
        0
    }
}

fn load_config(command: Command, args: &RunArgs) -> Result<ExperimentConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = Some(seed);
    }
    if let Some(c) = args.c {
        config.c = c;
    }
    if args.fixed_clock {
        config.fixed_clock = true;
    }
    if let Some(samples) = args.samples {
        config.budgets.samples = samples;
    }
    if let Some(out) = &args.out {
        config.out = Some(out.display().to_string());
    }
    if let Some(format) = args.format {
        config.format = Some(format);
    }
    config.validate_for(command)?;
    Ok(config)
}

/// Validate and dispatch one run, returning the finished report. This is
/// the whole pipeline minus flag handling and file delivery, so other
/// front ends (the Python bindings) share the exact behaviour.
pub fn run_report(command: Command, config: &ExperimentConfig) -> Result<ReportFile, CliError> {
    config.validate_for(command)?;
    let start = Instant::now();

    // The echoed config describes the experiment, not the delivery: the
    // destination keys are dropped so the same run is byte-identical no
    // matter where it is written.
    let mut echo = config.clone();
    echo.out = None;
    echo.format = None;

    let mut file = match command {
        Command::VerifyTheorem1 | Command::FitConstant => {
            let spec = config.suite_spec()?;
            let records = run_theorem1_suite(&spec)?;
            let fitted = fit_empirical_constant(&records).ok();
            let mut f = ReportFile::new(command, echo.clone(), 0, records);
            f.summary.fitted_constant = fitted;
            f
        }
        Command::VerifyCw => {
            let spec = config.suite_spec()?;
            let records = run_cw_suite(&spec)?;
            ReportFile::new(command, echo.clone(), 0, records)
        }
        Command::VerifyClassical => {
            let spec = config.classical_spec()?;
            let records = run_classical_suite(&spec)?;
            ReportFile::new(command, echo.clone(), 0, records)
        }
        Command::Tightness => {
            let (degrees, epsilons) = config.tightness_grid();
            let mut rows = Vec::with_capacity(degrees.len() * epsilons.len());
            for &d in &degrees {
                for &eps in &epsilons {
                    rows.push(tightness_exponential(d, eps, config.c)?);
                }
            }
            let mut f = ReportFile::new(command, echo.clone(), 0, Vec::new());
            f.tightness = rows;
            f
        }
        Command::SearchExtremal => {
            let spec = config.search_spec()?;
            let result = search_extremal(&spec)?;
            let mut f = ReportFile::new(command, echo.clone(), 0, Vec::new());
            f.summary.best_ratio = Some(result.best_ratio);
            f.search = Some(result);
            f
        }
    };

    file.total_runtime_ms =
        if config.fixed_clock { 0 } else { start.elapsed().as_millis() as u64 };
    Ok(file)
}

fn execute(command: Command, args: RunArgs) -> Result<i32, CliError> {
    let config = load_config(command, &args)?;
    let file = run_report(command, &config)?;

    let format = config.format.unwrap_or_default();
    match &config.out {
        Some(path) => file.write(std::path::Path::new(path), format)?,
        None => match format {
            ReportFormat::Json => print!("{}", file.to_json_string()),
            ReportFormat::Csv => print!("{}", file.to_csv_string()),
        },
    }

    if let Some(plot_path) = &args.plot {
        let svg = if !file.tightness.is_empty() {
            plot_tightness(&file.tightness)?
        } else if let Some(search) = &file.search {
            plot_search(search)?
        } else {
            plot_margins(&file.records)?
        };
        std::fs::write(plot_path, svg)
            .map_err(|e| CliError::Io { path: plot_path.display().to_string(), source: e })?;
    }

    let counts = file.summary.counts;
    match command {
        Command::Tightness => {
            eprintln!("{command}: {} (d, epsilon) pairs audited", file.tightness.len());
        }
        Command::SearchExtremal => {
            let best = file.summary.best_ratio.unwrap_or(f64::NAN);
            eprintln!("{command}: best ratio {best}");
        }
        _ => {
            eprintln!(
                "{command}: {} records; {} holds, {} within noise, {} violated, {} inconclusive{}",
                counts.total,
                counts.holds,
                counts.holds_within_noise,
                counts.violated,
                counts.inconclusive,
                match file.summary.fitted_constant {
                    Some(c_hat) => format!("; fitted constant {c_hat:.6}"),
                    None => String::new(),
                },
            );
        }
    }
    Ok(exit_code(&counts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_rank_violated_over_inconclusive() {
        let clean = VerdictCounts { holds: 3, holds_within_noise: 1, ..Default::default() };
        assert_eq!(exit_code(&clean), 0);
        let inconclusive = VerdictCounts { inconclusive: 1, ..clean };
        assert_eq!(exit_code(&inconclusive), 3);
        let violated = VerdictCounts { violated: 2, ..inconclusive };
        assert_eq!(exit_code(&violated), 2);
    }

    #[test]
    fn flags_parse_for_every_subcommand() {
        for name in [
            "verify-theorem1",
            "verify-cw",
            "verify-classical",
            "tightness",
            "search-extremal",
            "fit-constant",
        ] {
            let cli = Cli::try_parse_from([
                "remez-lab",
                name,
                "--seed",
                "3",
                "--c",
                "2.5",
                "--format",
                "csv",
                "--fixed-clock",
            ])
            .unwrap();
            let args = match cli.command {
                Sub::VerifyTheorem1(a)
                | Sub::VerifyCw(a)
                | Sub::VerifyClassical(a)
                | Sub::Tightness(a)
                | Sub::SearchExtremal(a)
                | Sub::FitConstant(a) => a,
            };
            assert_eq!(args.seed, Some(3));
            assert_eq!(args.c, Some(2.5));
            assert_eq!(args.format, Some(ReportFormat::Csv));
            assert!(args.fixed_clock);
        }
        assert!(Cli::try_parse_from(["remez-lab", "tightness", "--knid"]).is_err());
        assert!(Cli::try_parse_from(["remez-lab", "no-such-command"]).is_err());
    }

    #[test]
    fn flag_overrides_land_in_the_config_echo() {
        let args = RunArgs {
            config: None,
            seed: Some(11),
            c: Some(2.0),
            out: None,
            format: Some(ReportFormat::Csv),
            fixed_clock: true,
            samples: Some(5000),
            plot: None,
        };
        let config = load_config(Command::Tightness, &args).unwrap();
        assert_eq!(config.seed, Some(11));
        assert_eq!(config.c, 2.0);
        assert_eq!(config.budgets.samples, 5000);
        assert_eq!(config.format, Some(ReportFormat::Csv));
        assert!(config.fixed_clock);
    }

    #[test]
    fn missing_seed_surfaces_as_config_error() {
        let args = RunArgs {
            config: None,
            seed: None,
            c: None,
            out: None,
            format: None,
            fixed_clock: false,
            samples: None,
            plot: None,
        };
        let err = load_config(Command::Tightness, &args).unwrap_err();
        assert!(matches!(err, CliError::Config(ConfigError::MissingSeed)));
    }
}
