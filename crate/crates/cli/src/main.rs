#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{Context, Quantity, SweepRange};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Format, Table};

#[derive(Parser)]
#[command(
    name = "duopoly",
    version,
    about = "Regulated preemption duopoly: values, thresholds, equilibria and simulation"
)]
struct Cli {
    /// JSON run configuration; the shipped baseline when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format (sweeps default to csv, everything else to table)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Leader, follower and sharing values at one level
    Value {
        #[arg(long)]
        y: f64,
    },
    /// Strategic thresholds, with the risk-averse ones when gamma is given
    Thresholds {
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Equilibrium strategy, outcome and payoffs at one level
    Strategy {
        #[arg(long)]
        y: f64,
    },
    /// Plot-ready columns over a grid
    Sweep {
        #[arg(value_enum)]
        quantity: Quantity,
        #[arg(long)]
        y_min: Option<f64>,
        #[arg(long)]
        y_max: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        gamma_min: f64,
        #[arg(long, default_value_t = 10.0)]
        gamma_max: f64,
        /// Number of grid points
        #[arg(long, default_value_t = 201)]
        grid: usize,
    },
    /// Monte Carlo run compared against the closed forms
    Simulate {
        #[arg(long)]
        y: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the configured number of trials
        #[arg(long)]
        paths: Option<usize>,
    },
    /// Regime of the configured regulator
    Regime,
}

fn emit(table: &Table, format: Format) -> Result<(), CliError> {
    let mut buf = Vec::new();
    table.render(format, &mut buf)?;
    io::stdout()
        .lock()
        .write_all(&buf)
        .map_err(|e| CliError::Output(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::load(cli.config.as_deref())?;
    let ctx = Context::new(config)?;
    let format = cli.format.unwrap_or(Format::Table);
    match cli.command {
        Command::Value { y } => emit(&commands::value(&ctx, y)?, format),
        Command::Thresholds { gamma } => emit(&commands::thresholds(&ctx, gamma)?, format),
        Command::Strategy { y } => emit(&commands::strategy(&ctx, y)?, format),
        Command::Sweep {
            quantity,
            y_min,
            y_max,
            gamma_min,
            gamma_max,
            grid,
        } => {
            let range = match quantity {
                Quantity::ThresholdsVsGamma => SweepRange {
                    lo: gamma_min,
                    hi: gamma_max,
                    n: grid,
                },
                _ => SweepRange {
                    lo: y_min.unwrap_or(0.0),
                    hi: y_max.unwrap_or(1.2 * ctx.game.thresholds().y_f),
                    n: grid,
                },
            };
            let table = commands::sweep(&ctx, quantity, range)?;
            emit(&table, cli.format.unwrap_or(Format::Csv))
        }
        Command::Simulate { y, seed, paths } => {
            let out = commands::simulate(&ctx, y, seed, paths)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            emit(&out.table, format)?;
            match out.failure {
                Some(e) => Err(e),
                None => Ok(()),
            }
        }
        Command::Regime => emit(&commands::regime(&ctx)?, format),
    }
}

fn main() -> ExitCode {
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
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
