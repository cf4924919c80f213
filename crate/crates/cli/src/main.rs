//! `torquescore`: score motion clips by torque-space difficulty and analyse
//! the scores against tracking errors.

mod analyze;
mod calibrate;
mod config;
mod failure;
mod inspect;
mod partition;
mod score;
mod tables;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\nmotion format: torquescore-motion v1",
    "\nmodel format: torquescore-model v1",
);

#[derive(Debug, Parser)]
#[command(name = "torquescore", version, long_version = LONG_VERSION, about)]
struct Cli {
    /// Worker threads; all available cores when 0.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score motion files clip by clip.
    Score(score::ScoreArgs),
    /// Split motion files into fixed-length clip files plus a manifest.
    Partition(partition::PartitionArgs),
    /// Relate scores to tracking errors.
    Analyze(analyze::AnalyzeArgs),
    /// Search weights that best rank clips by tracking error.
    Calibrate(calibrate::CalibrateArgs),
    /// Dump per-frame joint torques or Jacobians of one motion.
    Inspect(inspect::InspectArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Score(a) => score::run(a, cli.threads),
        Command::Partition(a) => partition::run(a, cli.threads),
        Command::Analyze(a) => analyze::run(a),
        Command::Calibrate(a) => calibrate::run(a),
        Command::Inspect(a) => inspect::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
