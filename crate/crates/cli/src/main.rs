//! `rotcover`: command-line experiments for rotation placement and cap
//! transport. Results are CSV rows; `transport` also writes plan and
//! validation JSON files.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_FOUND: u8 = 2;
pub const EXIT_PLAN_FAILED: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code_for(&e))
        }
    }
}
