//! Batch front-end for the `abot` tools: reads problem and geometry files,
//! runs one pipeline and writes JSON, CSV and SVG artifacts into an output
//! directory.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::ffi::OsString;

use clap::Parser;

pub use commands::execute;
pub use config::{Cli, CommandKind, RunConfig, Tolerances};
pub use error::{exit, CliError};

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::PARSE } else { exit::OK };
        }
    };
    match cli.command.into_config().and_then(|cfg| execute(&cfg)) {
        Ok(a) => a.status,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
