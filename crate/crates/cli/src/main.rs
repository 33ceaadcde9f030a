//! `strata-lgt`: command-line front end for the stratified quantization library.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{JMax, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "strata-lgt", version, about = "Stratified quantization of SU(2) lattice gauge theory")]
struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides the spin cutoff, e.g. `3/2` or `1.5`.
    #[arg(long, global = true, value_name = "J")]
    jmax: Option<JMax>,
    /// Overrides the number of links N.
    #[arg(long, global = true, value_name = "N")]
    n: Option<usize>,
    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Classify sampled or given phase points by orbit type.
    Classify,
    /// Run the T-procedure on a constraint file.
    Tproc,
    /// Build, check and cache the quasi-character basis.
    Basis,
    /// Stratum projections, vertex overlaps and monotonicity residuals.
    Costrat,
    /// Single-plaquette spectrum and localization scan (N = 1).
    Spectrum,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Tproc => "tproc",
            Command::Basis => "basis",
            Command::Costrat => "costrat",
            Command::Spectrum => "spectrum",
        }
    }
}

/// A failure, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Output(String),
    Numeric(String),
    Cutoff(String),
    Unsupported(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Cutoff(_) => 4,
            CliError::Unsupported(_) => 5,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Output(m) => write!(f, "cannot write output: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Cutoff(m) => write!(f, "{m}"),
            CliError::Unsupported(m) => write!(f, "unsupported: {m}"),
        }
    }
}

impl From<strata_lgt::Error> for CliError {
    fn from(e: strata_lgt::Error) -> Self {
        use strata_lgt::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidInput(_) | E::Json(_) | E::Io(_) | E::InvalidElement { .. } | E::DimensionMismatch { .. } => {
                CliError::Config(msg)
            }
            E::InsufficientCutoff(_) => CliError::Cutoff(msg),
            E::Unsupported(_) => CliError::Unsupported(msg),
            _ => CliError::Numeric(msg),
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("STRATA_LGT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Config(format!("STRATA_LGT_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    init_threads()?;
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let overrides = Overrides { seed: cli.seed, out: cli.out.clone(), jmax: cli.jmax, n: cli.n };
    let config = RunConfig::load(path, &overrides)?;
    let report = match cli.command {
        Command::Classify => commands::classify(&config),
        Command::Tproc => commands::tproc(&config),
        Command::Basis => commands::basis(&config),
        Command::Costrat => commands::costrat(&config),
        Command::Spectrum => commands::spectrum(&config),
    }?;
    log::info!(
        "{}: wrote {} files and report.json to {}",
        cli.command.name(),
        report.outputs.len(),
        config.output_dir().display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut logger = env_logger::Builder::new();
    logger.format_timestamp(None);
    if cli.quiet {
        logger.filter_level(log::LevelFilter::Error);
    } else {
        logger.filter_level(log::LevelFilter::Info).parse_default_env();
    }
    logger.init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
