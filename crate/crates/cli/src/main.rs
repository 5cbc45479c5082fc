use std::process::ExitCode;

use backbone_core::{Error, ErrorCategory};
use clap::Parser;

mod args;
mod commands;

use args::{Cli, Command};

fn exit_code(err: &anyhow::Error) -> u8 {
    let category = err
        .chain()
        .find_map(|e| e.downcast_ref::<Error>())
        .map(Error::category);
    match category {
        Some(ErrorCategory::Parse) => 3,
        Some(ErrorCategory::Config) => 4,
        Some(ErrorCategory::Contract) => 5,
        Some(ErrorCategory::Io) | None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Restructure(a) => commands::restructure(a),
        Command::Simulate(a) => commands::simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
