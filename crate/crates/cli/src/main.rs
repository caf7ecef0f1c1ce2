mod args;
mod commands;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use strohhacker_core::Error;

use args::{Cli, Command, Format, Params, UsageError, DEFAULT_SEED};
use commands::{Outcome, RunContext};

const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("STROHHACKER_THREADS") else {
        return Ok(());
    };
    let threads: usize = match value.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return args::usage(format!("STROHHACKER_THREADS = {value:?} must be a positive integer")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: &Cli) -> Result<Outcome> {
    configure_threads()?;
    let params = Params::load(cli.params.as_ref())?;
    let seed = params.number(cli.seed, "seed")?.unwrap_or(DEFAULT_SEED);
    let format = match (cli.format, params.text("format")) {
        (Some(f), _) => f,
        (None, None) => Format::Json,
        (None, Some(name)) => Format::from_str(&name, true).or_else(|e| args::usage(format!("params: format: {e}")))?,
    };
    let output = cli.output.clone().or_else(|| params.text("output").map(PathBuf::from));
    let ctx = RunContext {
        format,
        seed,
        params: &params,
    };
    let outcome = match &cli.command {
        Command::Thresholds(a) => commands::thresholds(&ctx, a),
        Command::Admissible(a) => commands::admissible(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Sharpness(a) => commands::sharpness(&ctx, a),
    }?;
    match &output {
        Some(path) => std::fs::write(path, &outcome.body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(outcome.body.as_bytes())?,
    }
    Ok(outcome)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Infeasible(_)) => EXIT_INFEASIBLE,
        Some(Error::Domain(_) | Error::InvalidGrid(_) | Error::ClassMismatch(_)) => EXIT_USAGE,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.exit),
        Err(err) => {
            eprintln!("strohhacker {}: {err:#}", cli.command.name());
            ExitCode::from(exit_code(&err))
        }
    }
}
