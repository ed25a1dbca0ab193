//! `subplanck`: overlap sweeps, figure curves, Wigner grids and the
//! ring-source comparison as CSV.

mod args;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
}

impl From<subplanck::Error> for CliError {
    fn from(e: subplanck::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "cannot write {}: {source}", path.display()),
        }
    }
}

fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var("SUBPLANCK_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("SUBPLANCK_THREADS must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    subplanck::parallel::init_thread_pool(threads_from_env()?)?;
    match cli.command {
        Command::Overlap(a) => commands::overlap(&a),
        Command::Fig1(a) => commands::fig1(&a),
        Command::Fig3(a) => commands::fig3(&a),
        Command::Wigner(a) => commands::wigner(&a),
        Command::Sensitivity(a) => commands::sensitivity(&a),
        Command::Vcz(a) => commands::vcz(&a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
