//! `horoscope --config run.json [--seed N] [--out PATH] [--format json|csv]`
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 inconclusive,
//! 3 configuration error.

mod analysis;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "horoscope", version, about = "Run metric-geometry analyses from a JSON descriptor")]
struct Args {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path; standard output when neither this nor the config sets one.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

const CONFIG_ERROR: u8 = 3;

fn execute(args: &Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = RunConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let format = args.format.or(config.format).unwrap_or(Format::Json);
    let out = args.out.clone().or_else(|| config.output.clone());
    let outcome = analysis::run(&config)?;
    let bytes = report::emit(&outcome.report, format)?;
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(path, bytes)?;
        }
        None => print!("{bytes}"),
    }
    Ok(outcome.status.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { CONFIG_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("horoscope: {e}");
            ExitCode::from(CONFIG_ERROR)
        }
    }
}
