//! `rigidcol`: bound evaluation, threshold search, scans and small-graph
//! experiments from the command line.

use std::process::ExitCode;

use clap::Parser;

use rigidcol_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, cli.json) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("rigidcol: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
