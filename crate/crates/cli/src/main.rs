mod args;
mod commands;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{BoundsCommand, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Skew(a) => commands::skew(a),
        Command::Bounds(BoundsCommand::Observables(a)) => commands::bounds_observables(a),
        Command::Bounds(BoundsCommand::Channels(a)) => commands::bounds_channels(a),
        Command::Example1(a) => commands::example1(a),
        Command::Audit(a) => commands::audit(a),
    };
    match result {
        Ok(json) => {
            let _ = writeln!(std::io::stdout().lock(), "{json}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
