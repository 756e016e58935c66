//! Command-line front end: parses a scenario configuration, runs the
//! requested schemes over seeded channel realizations, and writes the
//! sweep table, convergence traces, and run metadata to disk.
//!
//! Exit codes: 0 success, 1 usage error, 2 invalid configuration,
//! 3 runtime failure.

mod config;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use secbeam::sim::run_scenario;

#[derive(Parser)]
#[command(
    name = "secbeam",
    version,
    about = "Secrecy sum-rate simulator: joint beamforming and antenna selection under eavesdropping"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a configured experiment and write CSV/JSON artifacts.
    Run(RunArgs),
    /// Run the fast invariant suite and print one line per property.
    Selftest(SelftestArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Power,
    Rf,
}

#[derive(Args)]
pub struct RunArgs {
    /// Scenario configuration file (TOML; empty file = reference profile).
    #[arg(long)]
    config: PathBuf,
    /// Override the sweep axis.
    #[arg(long, value_enum)]
    sweep: Option<SweepKind>,
    /// Sweep values: dBm for a power sweep, RF-chain counts for an rf sweep.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Option<Vec<f64>>,
    /// Comma-separated subset of pdd,so,random,energy,mrt.
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for the three artifact files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
pub struct SelftestArgs {
    /// Test hook: force the named property to fail.
    #[arg(long, hide = true)]
    corrupt: Option<String>,
}

/// Error carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Selftest(args) => selftest::cmd_selftest(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut spec = config::parse_scenario(&args.config)?;
    config::apply_overrides(&mut spec, &args)?;
    spec.validate()
        .map_err(|e| CliError::validation(e.to_string()))?;

    let result = run_scenario(&spec).map_err(|e| CliError::runtime(e.to_string()))?;
    output::write_artifacts(&args.out, &spec, &result)?;

    // A cell losing more than half its realizations means the numbers are
    // not trustworthy; report it as a failed run after writing everything.
    let mut broken = Vec::new();
    for cell in &result.cells {
        if 2 * cell.n_fail > spec.num_realizations {
            broken.push(format!(
                "scheme {} at sweep value {}: {}/{} realizations failed",
                cell.scheme, cell.sweep_value, cell.n_fail, spec.num_realizations
            ));
        }
    }
    if !broken.is_empty() {
        return Err(CliError::runtime(format!(
            "failure rate above 50% in {} cell(s):\n  {}",
            broken.len(),
            broken.join("\n  ")
        )));
    }
    Ok(())
}
