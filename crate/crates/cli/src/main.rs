//! `netcomm`: build, describe and partition coauthorship networks, and
//! test communities against scholar attributes.
//!
//! Exit codes: 0 success, 1 `replay --verify` mismatch, 2 usage or input
//! error, 3 algorithm precondition not met.

mod args;
mod commands;
mod error;
mod manifest;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("NETCOMM_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("NETCOMM_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn main() {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = configure_threads().and_then(|()| commands::run(cli, &argv));
    if let Err(e) = result {
        eprintln!("netcomm: {e}");
        std::process::exit(e.exit_code());
    }
}
