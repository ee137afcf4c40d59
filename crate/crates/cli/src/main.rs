//! `radnorm`: studies of radial Besov and Lizorkin-Triebel quasi-norms.
//!
//! Every command writes one JSON report (schema `radnorm/1`) and optionally a
//! CSV table of value and error per grid point. Exit status: 0 on success,
//! 1 when every grid point fails its hypothesis, 2 when a value is not finite,
//! 3 on invalid input.

mod output;
mod study;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::output::{write_report, Report};
use crate::study::{run_command, Command};

#[derive(Debug, Parser)]
#[command(
    name = "radnorm",
    version,
    about = "Radial Besov and Lizorkin-Triebel quasi-norm studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML file overriding quadrature defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for every Monte Carlo estimate.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// JSON report path; stdout when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Also write value and error per grid point as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = study::load_config(cli.config.as_deref(), cli.seed)
        .and_then(|cfg| run_command(&cli.command, &cfg))
        .and_then(|report: Report| {
            write_report(&report, cli.output.as_deref(), cli.csv.as_deref())?;
            Ok(report)
        });
    match result {
        Ok(report) => {
            for line in &report.notes {
                eprintln!("{line}");
            }
            ExitCode::from(report.status.code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
