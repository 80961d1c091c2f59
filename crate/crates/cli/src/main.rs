use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pfbound::runner::{self, LoadedConfig, RunError};

/// Bounds on the speed of quantum information from two-station fringe data.
#[derive(Parser)]
#[command(name = "pfbound", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config file.
    #[arg(short, long)]
    config: PathBuf,
    /// Directory for output files; nothing is written without it.
    #[arg(short, long)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Speed profile, crossings and half-fringe bound in the configured frame.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Sampling step in seconds.
        #[arg(long, default_value_t = 10.0)]
        step: f64,
    },
    /// Repeat the analysis over a grid of candidate frames.
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10.0)]
        step: f64,
    },
    /// Projected reach of an experiment design.
    Plan {
        #[command(flatten)]
        common: Common,
    },
    /// Synthetic counts under a finite-speed hypothesis and collapse detection.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Analyse this counts CSV instead of generating one.
        #[arg(long)]
        counts: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<String, RunError> {
    match cli.command {
        Command::Analyze { common, step } => {
            let loaded = LoadedConfig::from_path(&common.config)?;
            Ok(runner::run_analyze(&loaded, step, common.out_dir.as_deref())?.to_string())
        }
        Command::Scan { common, step } => {
            let loaded = LoadedConfig::from_path(&common.config)?;
            Ok(runner::run_scan(&loaded, step, common.out_dir.as_deref())?.to_string())
        }
        Command::Plan { common } => {
            let loaded = LoadedConfig::from_path(&common.config)?;
            Ok(runner::run_plan(&loaded, common.out_dir.as_deref())?.to_string())
        }
        Command::Simulate { common, seed, counts } => {
            let loaded = LoadedConfig::from_path(&common.config)?;
            let report = runner::run_simulate(&loaded, seed, counts.as_deref(), common.out_dir.as_deref())?;
            Ok(report.to_string())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
