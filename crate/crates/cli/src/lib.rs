//! Command-line front end for `parking-core`: single solves, figure data and
//! the verification battery, written as CSV or JSON lines.

pub mod args;
pub mod commands;
pub mod output;

use std::ffi::OsString;

use clap::Parser;

use crate::args::{Cli, Command};

pub const EXIT_INVALID_ARGS: i32 = 1;

/// Parses `argv` and runs the selected command, returning the process exit
/// status. Errors are printed to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID_ARGS
            } else {
                commands::EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Curve(a) => commands::curve(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::EquilibriumCurve(a) => commands::equilibrium_curve(a),
        Command::Verify(a) => commands::verify(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        EXIT_INVALID_ARGS
    })
}
