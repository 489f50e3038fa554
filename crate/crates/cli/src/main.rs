//! `sweep`: solve, study, audit and reduce sweeping-process scenarios.
//!
//! Exit codes: 0 success, 1 audit violations, 2 solver error, 3 invalid input.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use commands::{execute, Command, Failure};

#[derive(Debug, Parser)]
#[command(
    name = "sweep",
    version,
    about = "Catching-up solver for perturbed sweeping processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Validation(msg) => eprintln!("error: {msg}"),
                Failure::Solver(msg) => eprintln!("solver error: {msg}"),
                Failure::Violations => eprintln!("audit failed"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
