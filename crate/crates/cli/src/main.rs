use std::process::ExitCode;

use clap::Parser;
use impact_cli::Cli;

fn main() -> ExitCode {
    match impact_cli::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
