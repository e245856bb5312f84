//! Command-line front end.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use config::{Format, ScenarioConfig};
use output::Report;

#[derive(Debug, Parser)]
#[command(name = "corrugated-cp", version, about = "Dipole and Casimir-Polder energies above a corrugated mirror")]
pub struct Cli {
    /// Scenario configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Accept corrugation heights above a tenth of the distance.
    #[arg(long, global = true)]
    pub allow_large_amplitude: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Energy against lateral position.
    Energy,
    /// Regime labels over wavelength and azimuth.
    RegimeMap,
    /// Minimum positions over orientations.
    XminMap,
    /// Peak/valley transition per aspect ratio.
    Transition,
    /// Lateral oscillation frequency against height.
    Frequency,
    /// Spectral energy against the real-space quadrature.
    OracleCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Energy => "energy",
            Command::RegimeMap => "regime-map",
            Command::XminMap => "xmin-map",
            Command::Transition => "transition",
            Command::Frequency => "frequency",
            Command::OracleCheck => "oracle-check",
        }
    }
}

/// Runs a command on a parsed configuration.
pub fn execute(command: Command, config: ScenarioConfig, allow_large_amplitude: bool) -> Result<Report> {
    let canonical = config.canonical();
    let ctx = commands::Context::new(config, allow_large_amplitude)?;
    let tables = match command {
        Command::Energy => commands::energy(&ctx)?,
        Command::RegimeMap => commands::regime_map(&ctx)?,
        Command::XminMap => commands::xmin_map(&ctx)?,
        Command::Transition => commands::transition(&ctx)?,
        Command::Frequency => commands::frequency(&ctx)?,
        Command::OracleCheck => commands::oracle_check(&ctx)?,
    };
    Ok(Report::new(command.name(), &canonical, tables))
}

pub fn run(cli: Cli) -> Result<()> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config <file> is required".into()))?;
    let config = ScenarioConfig::load(path)?;
    let output = config.output.clone();
    let format = cli
        .format
        .or_else(|| output.as_ref().and_then(|o| o.format))
        .unwrap_or(Format::Csv);
    let out = cli.out.clone().or_else(|| output.and_then(|o| o.path));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let report = pool.install(|| execute(cli.command, config, cli.allow_large_amplitude))?;
    report.write(format, out.as_deref())?;
    Ok(())
}
