mod plots;
mod run;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Monte Carlo laboratory for random walks in random sceneries.
#[derive(Parser)]
#[command(name = "rwrs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config and write reports.
    Run {
        config: PathBuf,
        /// Worker threads; overrides the config and RWRS_THREADS.
        #[arg(long)]
        threads: Option<usize>,
        /// Write into this directory instead of <output_dir>/<hash>-<timestamp>.
        #[arg(long)]
        run_dir: Option<PathBuf>,
    },
    /// Turn the reports of a finished run into plot-ready CSV files.
    Plots { report_dir: PathBuf },
    /// Parse and audit a config without running it.
    Validate { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, threads, run_dir } => run::run(&config, threads, run_dir.as_deref()),
        Command::Plots { report_dir } => plots::emit(&report_dir).map(|_| true),
        Command::Validate { config } => run::validate(&config).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
