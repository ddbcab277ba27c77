use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;

use args::Cli;

/// How a run ended, other than success.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config or input files (exit 2).
    Usage(String),
    /// A numerical engine failed (exit 3).
    Numerical(String),
    /// A bound was definitely violated (exit 1).
    Violation(String),
}

impl From<antipodal::Error> for Failure {
    fn from(e: antipodal::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
