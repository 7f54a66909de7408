// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

//! `rsdual`: duality conversion, reduced flows and verification suites.

mod dualize;
mod flow;
mod pointfile;
mod verify;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use rsdual::ToleranceConfig;

/// Failure carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Some verification check failed (exit 1).
    Checks,
    /// A point or sample could not be certified or computed (exit 2).
    Numerical(String),
    /// Bad flags or malformed input (exit 3).
    Malformed(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks => 1,
            Failure::Numerical(_) => 2,
            Failure::Malformed(_) => 3,
        }
    }
}

pub type CliResult = Result<(), Failure>;

pub fn malformed(e: impl std::fmt::Display) -> Failure {
    Failure::Malformed(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "rsdual",
    version,
    about = "Ruijsenaars-Schneider duality from the Heisenberg double"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map points between the original and dual phase spaces.
    Dualize(dualize::Args),
    /// Sample a reduced flow on a time grid and write CSV.
    Flow(flow::Args),
    /// Run verification suites.
    Verify(verify::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    let result = ToleranceConfig::from_env()
        .map_err(malformed)
        .and_then(|tol| match &cli.command {
            Command::Dualize(a) => dualize::run(a, &tol),
            Command::Flow(a) => flow::run(a, &tol),
            Command::Verify(a) => verify::run(a, &tol),
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Checks => {}
                Failure::Numerical(m) | Failure::Malformed(m) => eprintln!("rsdual: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
