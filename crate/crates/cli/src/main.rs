//! `qsl`: batch runner for the QSL Deutsch-Jozsa and Simon experiments.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a failed check (an
//! incorrect record, a verification threshold breach or a blown time budget).

mod args;
mod bench;
mod output;
mod trials;
mod verify;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_CHECK_FAILED: u8 = 2;

/// A command outcome: `Ok(true)` if every check passed.
pub type Outcome = Result<bool, Failure>;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.into())
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("QSL_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Usage(format!("QSL_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| Failure::Other(e.into()))
}

fn run(cli: Cli) -> Outcome {
    let pool = thread_pool()?;
    match cli.command {
        Command::Dj(a) => pool.install(|| trials::cmd_dj(&a)),
        Command::Simon(a) => pool.install(|| trials::cmd_simon(&a)),
        Command::Verify(a) => pool.install(|| verify::cmd_verify(&a)),
        Command::Bench(a) => bench::cmd_bench(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
