mod args;
mod commands;
mod error;
mod manifest;

use std::ffi::OsString;

use clap::Parser;

use crate::args::Cli;
use crate::error::{Failure, EXIT_USAGE};

fn main() {
    std::process::exit(run(std::env::args_os()));
}

fn run(argv: impl IntoIterator<Item = OsString>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result =
        configure_threads().and_then(|()| commands::execute(&cli.command, &Default::default()));
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("hnewton: {f}");
            f.exit_code()
        }
    }
}

/// `HN_THREADS` caps the worker pool.
fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("HN_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::usage(format!(
                "HN_THREADS must be a positive integer, got `{value}`"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(Failure::usage)
}
