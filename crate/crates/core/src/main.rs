use std::process::ExitCode;

use clap::Parser;
use spinboson::cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinboson: {e}");
            ExitCode::from(if e.is_numerical_guard() { 2 } else { 1 })
        }
    }
}
