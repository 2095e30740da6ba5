mod args;
mod commands;
mod config;
mod plot;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => commands::solve(args),
        Command::Study(args) => commands::study(args),
        Command::Operators(args) => commands::operators(args),
        Command::Refine(args) => commands::refine(args),
        Command::Residual(args) => commands::residual(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            std::process::exit(err.exit_code());
        }
    }
}
