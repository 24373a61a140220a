//! Command-line driver for the `fhn-cnn` lattice simulator.
//!
//! Subcommands:
//!
//! * `constants` prints `C1`, `C2`, `Q` and the threshold as JSON.
//! * `simulate` runs one trajectory and writes `scalars.csv` plus the
//!   optional `states.jsonl`, `summary.json` and `sync_error.svg`.
//! * `sweep` runs an `(a, p)` grid in parallel and writes `sweep.csv`.
//! * `verify` runs the numerical self-checks and prints a pass/fail report.
//!
//! Exit status: 0 on success, 1 when a check fails or the integration
//! diverges, 2 for usage and configuration errors.

pub mod commands;
pub mod config;
mod error;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub use config::RunConfig;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "fhn-cnn", version, about = "FitzHugh–Nagumo lattice with boundary feedback")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory, overriding `outputs.directory`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for `sweep` (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Seed for random initial data, overriding `initial.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Print the dissipativity constants.
    Constants,
    /// Integrate one trajectory and write its diagnostics.
    Simulate,
    /// Run the `sweep.a` × `sweep.p` grid.
    Sweep,
    /// Run the numerical self-checks.
    Verify,
}

impl Cli {
    pub fn load_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(dir) = &self.out {
            cfg.outputs.directory = dir.clone();
        }
        if let Some(seed) = self.seed {
            cfg = cfg.with_seed(seed);
        }
        Ok(cfg)
    }
}

/// A closed stdout (`| head`) is not an error.
fn print(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json<T: Serialize>(value: &T) {
    print(&format!("{}\n", serde_json::to_string_pretty(value).expect("report serializes")));
}

/// `constants` and `verify` only write files when `--out` is given.
fn save_json<T: Serialize>(dir: Option<&Path>, name: &str, value: &T) -> Result<(), CliError> {
    let Some(dir) = dir else { return Ok(()) };
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.into(), source: e })?;
    output::write_json(&dir.join(name), value)
}

/// Runs the parsed command and returns the process exit status.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    if cli.jobs == Some(0) {
        return Err(CliError::Config("--jobs: must be at least 1".into()));
    }
    let cfg = cli.load_config()?;
    match cli.command {
        Command::Constants => {
            let report = commands::constants(&cfg)?;
            save_json(cli.out.as_deref(), "constants.json", &report)?;
            print_json(&report);
            Ok(0)
        }
        Command::Simulate => {
            let summary = commands::run_simulation(&cfg)?;
            print_json(&summary);
            Ok(0)
        }
        Command::Sweep => {
            let rows = commands::sweep(&cfg, cli.jobs)?;
            print(&commands::sweep_csv(&rows));
            Ok(0)
        }
        Command::Verify => {
            let report = commands::verify(&cfg)?;
            save_json(cli.out.as_deref(), "verify.json", &report)?;
            print_json(&report);
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}
