//! Command-line surface for the `groenewold` crate.

pub mod commands;
pub mod config;
pub mod density_spec;
pub mod format;
pub mod verify;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

use config::{Cli, Command};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_NORMALIZATION: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(#[from] groenewold::Error),

    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::VerifyFailed(_) => EXIT_VERIFY,
            CliError::Numerical(groenewold::Error::InvalidParameter(_)) => EXIT_CONFIG,
            CliError::Numerical(groenewold::Error::Normalization { .. }) => EXIT_NORMALIZATION,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args`, runs the subcommand and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let config = cli.flags.resolve()?;
    match cli.command {
        Command::Spectrum => commands::spectrum(&config),
        Command::Sweep => commands::sweep(&config),
        Command::Quantize => commands::quantize(&config),
        Command::Verify => verify::run(&config),
    }
}
