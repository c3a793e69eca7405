use std::process::ExitCode;

use bellcheck::commands::{execute, Cli};
use bellcheck::{EXIT_FAIL, EXIT_INPUT, EXIT_PASS};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((text, passed)) => {
            print!("{text}");
            ExitCode::from(if passed { EXIT_PASS } else { EXIT_FAIL } as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT as u8)
        }
    }
}
