//! Batch front-end for the coherence-grating simulator.

pub mod commands;
pub mod config;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gratingsim::ErrorKind;

pub use config::{Format, RunConfig};

/// Worker-count override for parallel sweeps.
pub const WORKERS_ENV: &str = "GRATINGSIM_WORKERS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(gratingsim::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    /// A fit finished without meeting its convergence test.
    #[error("not converged: {0}")]
    NotConverged(String),
}

impl CliError {
    /// 0 success, 1 I/O, 2 configuration or validation, 3 data format,
    /// 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::NotConverged(_) => 4,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Io => 1,
                ErrorKind::Validation => 2,
                ErrorKind::Data => 3,
                ErrorKind::Numerical => 4,
            },
        }
    }
}

impl From<gratingsim::Error> for CliError {
    fn from(e: gratingsim::Error) -> Self {
        match e {
            gratingsim::Error::Io(io) => CliError::Io(io),
            other => CliError::Core(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gratingsim", version, about = "Coherence-grating write/store/read simulator")]
pub struct Cli {
    /// TOML run configuration; defaults are used when omitted.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file (overrides `[output].path`).
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Output format (overrides `[output].format`).
    #[arg(short, long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steady state of the write phase: linear solve next to the closed form.
    Steady,
    /// Write, store and read; emits the detected pulse S(t).
    Pulse(PulseArgs),
    /// Sweeps one parameter and tabulates FWHM, peak and energy.
    Sweep(SweepArgs),
    /// Fits a decay time or a rescale factor to measured data.
    Fit(FitArgs),
    /// Far-field intensity |E_D(k)|² on a plane through -k_W'.
    Farfield(FarfieldArgs),
    /// Prints the effective configuration as TOML.
    Config,
}

#[derive(Debug, Args)]
#[group(multiple = false)]
pub struct PulseArgs {
    /// Analytic read-out of the closed-form steady state (default).
    #[arg(long)]
    pub closed_form: bool,
    /// Integrated write and read phases.
    #[arg(long)]
    pub numeric: bool,
    /// Both paths, closed form first.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    ReadIntensity,
    WriteIntensity,
    StorageTime,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// `start:stop:n` (inclusive, evenly spaced) or a comma-separated list.
    /// Intensities in mW/cm², storage times in μs.
    #[arg(long)]
    pub grid: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitTarget {
    Tau,
    A,
    APrime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Amplitude,
    Intensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObservableArg {
    Fwhm,
    Peak,
    Energy,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Trace CSV or sweep-table CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub target: FitTarget,
    /// How a fitted decay time maps to γ (tau target only).
    #[arg(long, value_enum, default_value = "amplitude")]
    pub convention: Convention,
    /// Column of a sweep table to fit (a / a-prime targets).
    #[arg(long, value_enum, default_value = "energy")]
    pub observable: ObservableArg,
    /// Search interval `lo:hi` for a or a'.
    #[arg(long)]
    pub bounds: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Plane {
    Xy,
    Xz,
    Yz,
}

#[derive(Debug, Args)]
pub struct FarfieldArgs {
    /// Read time in μs.
    #[arg(long)]
    pub time: f64,
    #[arg(long, value_enum, default_value = "xy")]
    pub plane: Plane,
    /// Half-width of the k-grid in units of 1/L.
    #[arg(long, default_value_t = 3.0)]
    pub extent: f64,
    /// Points per axis.
    #[arg(long, default_value_t = 41)]
    pub points: usize,
}

/// Sizes the global rayon pool from [`WORKERS_ENV`] when it is set.
pub fn configure_workers() -> Result<(), CliError> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("{WORKERS_ENV}: {e}")))
}

/// Loads the configuration, applies command-line overrides and runs the
/// command, writing its output.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(f) = cli.format {
        cfg.output.format = f;
    }
    if let Some(p) = &cli.output {
        cfg.output.path = Some(p.clone());
    }
    commands::dispatch(&cli.command, &cfg)
}
