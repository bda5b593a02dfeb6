//! Command-line front end: law tables, operator checks, bound reports and
//! parameter sweeps, written as JSON or CSV.

mod args;
mod commands;
mod config;
mod family;
mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::{Cli, Command, Format};

/// Environment variable holding the default truncation tolerance.
pub const TOL_ENV: &str = "STEINOPS_TOL";

pub const DEFAULT_TOL: f64 = 1e-12;

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Invalid input, or a defect above threshold in `check-operator`.
    pub const INPUT: i32 = 1;
    /// A bound failed to dominate the exact distance under `--strict`.
    pub const VIOLATION: i32 = 2;
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                exit::INPUT
            } else {
                let _ = write!(out, "{text}");
                exit::SUCCESS
            };
        }
    };
    match commands::dispatch(cli, out) {
        Ok(status) => {
            if let Some(msg) = &status.message {
                let _ = writeln!(err, "{msg}");
            }
            status.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit::INPUT
        }
    }
}
