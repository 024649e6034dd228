use std::process::ExitCode;

use clap::Parser;
use spinthermo::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinthermo: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
