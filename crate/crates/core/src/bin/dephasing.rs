use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use dephasing::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let csv = match run(&cli.command) {
        Ok(csv) => csv,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.command.config().output {
        Some(path) => std::fs::write(path, csv.as_bytes()),
        None => std::io::stdout().lock().write_all(csv.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
