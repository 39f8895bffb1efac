mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use hyperu_core::Error;

const EXIT_VERIFICATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_budget_failure() => EXIT_BUDGET,
        Some(
            Error::InvalidInput(_)
            | Error::InvalidSpec(_)
            | Error::Unsupported(_)
            | Error::DimensionMismatch { .. }
            | Error::Domain(_),
        ) => EXIT_USAGE,
        Some(_) => EXIT_VERIFICATION,
        None if err.downcast_ref::<std::io::Error>().is_some() => EXIT_USAGE,
        None => EXIT_VERIFICATION,
    }
}

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFICATION),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
