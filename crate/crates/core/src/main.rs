use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use idjt::cli::{run, Cli, Command, RunConfig};

fn main() -> ExitCode {
    let Cli { command } = Cli::parse();
    let outcome = match command {
        Command::Solve(args) => run(&RunConfig::from(args)),
    };
    let _ = std::io::stdout().write_all(outcome.report.as_bytes());
    let _ = std::io::stderr().write_all(outcome.errors.as_bytes());
    ExitCode::from(outcome.code as u8)
}
