use std::process::ExitCode;

use chargecs_cli::{run, RunConfig, THREADS_ENV};
use clap::Parser;

fn main() -> ExitCode {
    let config = RunConfig::parse();
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("internal error: thread pool: {e}");
                    return ExitCode::from(1);
                }
            }
            _ => {
                eprintln!("invalid input: {THREADS_ENV} must be a positive integer, got {raw:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
