//! `qkd-bound`: command-line access to phase-error bounds, error tolerances,
//! decoy-state key rates and channel simulations.
//!
//! Every output embeds the fully resolved run configuration. Errors are
//! written to stderr as a single JSON record; usage errors exit with status
//! 2, computation and input errors with status 1.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod measured;
pub mod output;
pub mod subset;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use serde::Serialize;

use crate::args::{Cli, Command};
use crate::commands::Outcome;
use crate::error::{CliError, CliResult};

fn emit<C: Serialize>(outcome: CliResult<Outcome<C>>, stdout: &mut dyn Write) -> CliResult<()> {
    let o = outcome?;
    output::write_output(&o.table, o.format, &o.config, o.output.as_deref(), stdout)
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> CliResult<()> {
    use commands::*;
    match cmd {
        Command::Bound(a) => emit(resolve_bound(&a).and_then(run_bound), stdout),
        Command::Curve(a) => emit(resolve_curve(&a).and_then(run_curve), stdout),
        Command::Tolerance(a) => emit(resolve_tolerance(&a).and_then(run_tolerance), stdout),
        Command::Decoy(a) => emit(resolve_decoy(&a).and_then(run_decoy), stdout),
        Command::Simulate(a) => emit(resolve_simulate(&a).and_then(run_simulate), stdout),
    }
}

/// Run with explicit arguments and streams; returns the exit status.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            err.write_record(stderr);
            return err.exit_code();
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            e.write_record(stderr);
            e.exit_code()
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
