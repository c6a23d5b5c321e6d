use std::process::ExitCode;

use clap::Parser;
use helmwave::cli::{execute, threads_from_env, Cli, RunConfig};
use helmwave::Error;

fn run() -> Result<i32, Error> {
    // clap prints help/version and exits with status 2 on malformed arguments.
    let config = RunConfig::from_cli(Cli::parse())?;
    let outcome = execute(&config, threads_from_env()?)?;
    print!("{}", outcome.stdout);
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("helmwave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
