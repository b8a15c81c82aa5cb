//! `lcsamp`: command-line harness for level-crossing sampling experiments.

mod commands;
mod error;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "lcsamp", version, about = "Level-crossing sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    shared: Shared,
}

/// Flags accepted by every subcommand.
#[derive(Debug, Args, Clone, Default)]
pub struct Shared {
    /// Clock scale exponent: 2^j samples on [0, 1).
    #[arg(long = "j", global = true)]
    pub j: Option<u32>,

    /// Level exponent: levels spaced by 2^-M.
    #[arg(long = "M", global = true)]
    pub m: Option<u32>,

    /// Random seed (master seed for sweeps).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output path.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    /// Sweep configuration file (`key = value` lines).
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,

    /// Monte Carlo realizations per sweep cell.
    #[arg(long, global = true)]
    pub realizations: Option<usize>,

    /// Signal generator: fbm, weierstrass, ramp or constant.
    #[arg(long, global = true)]
    pub generator: Option<String>,

    /// Hurst index in (0, 1).
    #[arg(long = "H", global = true)]
    pub hurst: Option<f64>,

    /// Plateau fraction for critical-H detection.
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated signal file.
    Generate {
        /// Truncation bound on the discarded Weierstrass tail.
        #[arg(long)]
        tail_tol: Option<f64>,
    },
    /// Run normalize, quantize and decimate on one signal.
    Sample(commands::SampleArgs),
    /// Per-scale oscillation report and Hölder exponent estimate.
    Analyze(commands::AnalyzeArgs),
    /// Monte Carlo sweep over H, j and M.
    Sweep(commands::SweepArgs),
    /// Critical Hurst values from a sweep.
    Critical(commands::CriticalArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let shared = &cli.shared;
    match cli.command {
        Command::Generate { tail_tol } => commands::generate(shared, tail_tol),
        Command::Sample(args) => commands::sample(shared, &args),
        Command::Analyze(args) => commands::analyze(shared, &args),
        Command::Sweep(args) => commands::sweep(shared, &args),
        Command::Critical(args) => commands::critical(shared, &args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lcsamp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
