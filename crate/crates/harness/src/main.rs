use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gftpl::{plot_traces, run_experiment, verify, ExperimentConfig, Result};

#[derive(Parser)]
#[command(
    name = "gftpl",
    version,
    about = "Run and inspect generalized FTPL experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write traces plus summary.json.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Comma-separated seeds replacing the configured list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check the invariants of the configured environment.
    Verify { config: PathBuf },
    /// Draw cumulative regret curves from trace files.
    Plot {
        pattern: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            config,
            out,
            seeds,
            jobs,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(seeds) = seeds {
                cfg.seeds = seeds;
                cfg.validate()?;
            }
            let summary = run_experiment(&cfg, &out, jobs)?;
            for h in &summary.horizons {
                println!(
                    "T = {}: mean regret {:.4} over {} seeds",
                    h.horizon,
                    h.mean_regret,
                    h.runs.len()
                );
            }
            if let Some(r) = summary.regret_ratio {
                println!("regret ratio {r:.4}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { config } => {
            let report = verify(&ExperimentConfig::from_path(&config)?)?;
            for c in &report.checks {
                println!(
                    "{}: {} {}",
                    c.name,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.detail
                );
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Plot { pattern, out } => {
            let n = plot_traces(&pattern, &out)?;
            println!("plotted {n} traces to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
