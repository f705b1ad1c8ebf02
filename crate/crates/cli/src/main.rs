//! `orthorec`: compute, verify and analyse the orthorecursive expansion
//! coefficients from the command line.
//!
//! Exit status: 0 pass, 1 fail, 2 indeterminate, 64 usage error, 65 unusable
//! cache, 66 precision escalation exhausted, 70 internal error, 74 I/O error.

mod args;
mod commands;
mod output;
mod tables;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use orthorec::{Error, Status};

use crate::args::{Cli, EngineArg};
use crate::output::{emit, Provenance};

const EXIT_FAIL: u8 = 1;
const EXIT_INDETERMINATE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_CACHE: u8 = 65;
const EXIT_INFEASIBLE: u8 = 66;
const EXIT_INTERNAL: u8 = 70;
const EXIT_IO: u8 = 74;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Cache(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Cache(_) => EXIT_CACHE,
            CliError::Core(e) => match e {
                Error::Capacity { .. } | Error::InvalidArgument(_) | Error::Parse(_) => EXIT_USAGE,
                Error::MaxPrecisionExceeded { .. } => EXIT_INFEASIBLE,
                Error::Cache(_) => EXIT_CACHE,
                Error::Indeterminate(_) | Error::Insufficient(_) => EXIT_INDETERMINATE,
                Error::Containment { .. } => EXIT_FAIL,
                Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_IO,
                Error::Invariant(_) => EXIT_INTERNAL,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Cache(m) => format!("unusable cache: {m}"),
            CliError::Core(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let outcome = match commands::run(&cli.command, &cli.common) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("orthorec: {}", e.message());
            return ExitCode::from(e.exit_code());
        }
    };
    let prov = Provenance {
        engine: match cli.common.engine {
            EngineArg::Exact => "exact",
            EngineArg::Ball => "ball",
        },
        n_max: cli.common.n_max,
        precision_bits: outcome.precision_bits,
    };
    if let Err(e) = emit(
        &outcome.report,
        &prov,
        cli.common.format,
        std::io::stdout().lock(),
    ) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return ExitCode::SUCCESS;
        }
        eprintln!("orthorec: {e}");
        return ExitCode::from(EXIT_IO);
    }
    ExitCode::from(match outcome.report.status {
        Status::Pass => 0,
        Status::Fail => EXIT_FAIL,
        Status::Indeterminate => EXIT_INDETERMINATE,
    })
}
