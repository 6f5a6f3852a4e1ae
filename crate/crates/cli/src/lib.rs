//! Command-line front end for the cache-aided NOMA model: per-case power
//! optimization, parameter sweeps, split-file surfaces, Monte Carlo
//! validation and concavity checks, all emitted as CSV.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use canoma::caching::CacheCase;
use clap::{Parser, Subcommand, ValueEnum};

pub use commands::Report;
use commands::{CaseSelector, SweepVariable};
pub use config::Config;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "canoma", version, about = "Cache-aided NOMA power allocation over double Nakagami-m links")]
pub struct Cli {
    /// JSON scenario file; missing keys take the baseline values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    A,
    B,
    C,
    D,
    All,
    Split,
}

impl From<CaseArg> for CaseSelector {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::A => CaseSelector::One(CacheCase::A),
            CaseArg::B => CaseSelector::One(CacheCase::B),
            CaseArg::C => CaseSelector::One(CacheCase::C),
            CaseArg::D => CaseSelector::One(CacheCase::D),
            CaseArg::All => CaseSelector::All,
            CaseArg::Split => CaseSelector::Split,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum VariableArg {
    Zeta,
    SnrDb,
    CacheSize,
    Omega,
    M,
    NumFiles,
}

impl From<VariableArg> for SweepVariable {
    fn from(v: VariableArg) -> Self {
        match v {
            VariableArg::Zeta => SweepVariable::Zeta,
            VariableArg::SnrDb => SweepVariable::SnrDb,
            VariableArg::CacheSize => SweepVariable::CacheSize,
            VariableArg::Omega => SweepVariable::Omega,
            VariableArg::M => SweepVariable::M,
            VariableArg::NumFiles => SweepVariable::NumFiles,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal power allocation per case (a-d, all) or for split files.
    Optimize {
        #[arg(long, value_enum, default_value_t = CaseArg::All)]
        case: CaseArg,
    },
    /// Averaged success of NOMA, OMA and conventional NOMA over a parameter range.
    Sweep {
        #[arg(long, value_enum)]
        variable: VariableArg,
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Split-file objective on a grid over both branches.
    Surface {
        #[arg(long, default_value_t = 51)]
        grid: usize,
    },
    /// Analytic probabilities against Monte Carlo.
    Validate {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Objective curves and second-difference concavity verdicts.
    Concavity {
        #[arg(long, value_enum, default_value_t = CaseArg::All)]
        case: CaseArg,
        #[arg(long, default_value_t = 101)]
        grid: usize,
    },
}

/// Loads the configuration and runs the subcommand.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::baseline(),
    };
    let workers = usize::try_from(cli.workers).map_err(|_| CliError::Usage("--workers too large".into()))?;
    match &cli.command {
        Command::Optimize { case } => commands::cmd_optimize(&cfg, (*case).into()),
        Command::Sweep {
            variable,
            from,
            to,
            steps,
        } => commands::cmd_sweep(&cfg, (*variable).into(), *from, *to, *steps, workers),
        Command::Surface { grid } => commands::cmd_surface(&cfg, *grid, workers),
        Command::Validate { samples } => commands::cmd_validate(&cfg, *samples, cli.seed, workers),
        Command::Concavity { case, grid } => commands::cmd_concavity(&cfg, (*case).into(), *grid),
    }
}
