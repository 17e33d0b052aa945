// SPDX-License-Identifier: Apache-2.0

mod commands;
mod config;
mod error;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "laserchi", version, about = "Laser-noise budgets for single-qubit gate fidelity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the analysis described by a scenario file and write its artifacts
    Run { config: PathBuf },
    /// Report unit assumptions, domain checks and the noise-region verdict
    Validate { config: PathBuf },
    /// Print β- and χ-separation lines on a log grid
    Lines {
        /// in-loop white frequency-noise level, (rad/s)²/Hz
        #[arg(long = "h-a")]
        h_a: f64,
        /// Rabi frequency, rad/s
        #[arg(long)]
        rabi: f64,
        /// free-running white level, (rad/s)²/Hz
        #[arg(long = "h-b")]
        h_b: Option<f64>,
        /// grid start, rad/s (default Ω/10³)
        #[arg(long)]
        lo: Option<f64>,
        /// grid end, rad/s (default 10³ Ω)
        #[arg(long)]
        hi: Option<f64>,
        #[arg(long, default_value_t = 5)]
        per_decade: usize,
    },
    /// Compare filter-function and Monte Carlo fidelities for a point scenario
    McCompare {
        config: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the built-in laser noise presets
    Presets,
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config } => commands::run(&config),
        Command::Validate { config } => {
            print!("{}", commands::validate(&config));
            Ok(())
        }
        Command::Lines {
            h_a,
            rabi,
            h_b,
            lo,
            hi,
            per_decade,
        } => {
            print!(
                "{}",
                commands::lines(&commands::LinesArgs {
                    h_a,
                    rabi,
                    h_b,
                    lo,
                    hi,
                    per_decade,
                })?
            );
            Ok(())
        }
        Command::McCompare { config, n, seed } => commands::mc_compare(&config, n, seed),
        Command::Presets => {
            print!("{}", commands::presets()?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("laserchi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
