//! Command-line front end. [`run`] does all the work so that tests can drive
//! it without spawning a process.

pub mod args;
mod commands;
pub mod report;

use std::io::Write;

pub use args::Cli;

/// Exit status for a run in which every check passed.
pub const EXIT_OK: u8 = 0;
/// Exit status when a mathematical check failed.
pub const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for usage and validation errors.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Library(#[from] metablock::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize output: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Library(metablock::Error::Invariant(_)) => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        }
    }
}

/// Runs one command, writing the report to `out` and diagnostics to `err`.
/// Returns the process exit status.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match commands::dispatch(cli, out, err) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
