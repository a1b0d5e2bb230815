use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use partial_theta_cli::{configure_threads, execute, Cli, EXIT_INPUT, EXIT_NUMERICAL};

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT as u8);
    }
    let start = Instant::now();
    let mut outcome = execute(&cli.command);
    if let Some(record) = outcome.record.as_mut() {
        if cli.timing {
            record.timing_ms = start.elapsed().as_millis() as u64;
        }
        let text = match record.render(cli.format) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_NUMERICAL as u8);
            }
        };
        let written = match &cli.out {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
            }
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| e.to_string()),
        };
        if let Err(e) = written {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    if let Some(msg) = &outcome.message {
        eprintln!("error: {msg}");
    }
    ExitCode::from(outcome.code as u8)
}
