//! `mrp`: generate benchmark graphs, cluster them, and check walk identities.
//!
//! Exit codes: 0 on success, 1 when `diagnose` finds a failing check, 2 for
//! configuration, input, or I/O errors (no artifact is written in that case).

mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
