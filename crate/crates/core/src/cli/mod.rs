//! The `trend` command line: argument parsing and the subcommand drivers.

mod commands;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use commands::{cmd_backtest, cmd_export_signals, cmd_fit, cmd_montecarlo, cmd_validate_proxy, N_SWEEP};

use crate::error::{Result, EXIT_OK, EXIT_VALIDATION};
use crate::fit::Normalization;
use crate::series::Frequency;

#[derive(Debug, Parser)]
#[command(name = "trend", version, about = "Trend-following research engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Run the strategy over a pool and report statistics.
    Backtest(BacktestArgs),
    /// Fit linear, cubic and tanh response curves to the pooled scatter.
    Fit(FitArgs),
    /// Run a Monte Carlo experiment described in a TOML file.
    Montecarlo(MontecarloArgs),
    /// Correlate the strategy on two pools (e.g. spot proxies vs futures).
    ValidateProxy(ProxyArgs),
    /// Write per-instrument signal series.
    ExportSignals(PoolArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PoolArgs {
    /// Instrument manifest (TOML).
    #[arg(long)]
    pub manifest: PathBuf,
    /// EMA timescale in periods.
    #[arg(long, default_value_t = 5.0)]
    pub n: f64,
    /// Override the manifest's base frequency.
    #[arg(long)]
    pub frequency: Option<Frequency>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BacktestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pool: PoolArgs,
    /// Also report n ∈ {2, 3, 5, 7, 10, 15, 20}.
    #[arg(long)]
    pub n_sweep: bool,
    /// Trailing window of the rolling P&L (default 10, skipped if the
    /// history is shorter).
    #[arg(long)]
    pub window_years: Option<f64>,
    /// Divide aggregate P&L by √(active instruments).
    #[arg(long)]
    pub rescale_aggregate: bool,
    /// Accepted for uniformity; the backtest draws no random numbers.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pool: PoolArgs,
    #[arg(long, default_value = "sigma")]
    pub normalization: Normalization,
    /// Running-average block (default min(5000, points)).
    #[arg(long)]
    pub block: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MontecarloArgs {
    /// Experiment description (TOML with a `kind` key).
    #[arg(long)]
    pub experiment: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    pub n: f64,
    /// Overrides the experiment file's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProxyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pool: PoolArgs,
    /// The second pool.
    #[arg(long)]
    pub proxy_manifest: PathBuf,
}

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Backtest(a) => cmd_backtest(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Montecarlo(a) => cmd_montecarlo(a),
        Command::ValidateProxy(a) => cmd_validate_proxy(a),
        Command::ExportSignals(a) => cmd_export_signals(a),
    }
}

/// Parse `args`, run, and return the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match run(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
