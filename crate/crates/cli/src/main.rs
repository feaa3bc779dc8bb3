//! `pcnd`: the full novelty-detection pipeline as one binary.
//!
//! Subcommands cover generation (`gen-fractal`), extractor training
//! (`train-ae`), latent extraction (`extract`), one-class model fitting and
//! scoring (`fit`, `score`), protocol evaluation (`evaluate`, `benchmark`),
//! and latent-space inspection (`project`). Everything is seeded: two runs
//! with the same resolved configuration and inputs write byte-identical
//! artifacts. Timing and progress go to the log (stderr), never into
//! artifact files.
//!
//! Exit status: 0 on success, 1 on a usage error (bad flags, malformed
//! config, unknown names), 2 when a pipeline stage fails on data.

mod cmd;
mod config;

use clap::{Parser, Subcommand};
use config::{FileConfig, Resolver};
use log::LevelFilter;
use std::fmt;
use std::path::Path;
use std::process::ExitCode;
use std::str::FromStr;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(pcnd_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Data(e) => e.fmt(f),
        }
    }
}

impl From<pcnd_core::Error> for CliError {
    fn from(e: pcnd_core::Error) -> Self {
        CliError::Data(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            // Naming a class the data does not contain is a command-line
            // mistake, not a pipeline failure, wherever it surfaces.
            CliError::Data(pcnd_core::Error::UnknownClass { .. }) => 1,
            CliError::Data(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "pcnd", version, about = "Point-cloud novelty detection pipeline")]
struct Cli {
    /// Flat key=value config file mirroring this subcommand's flags
    /// ('#' comments); command-line flags override file values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<String>,

    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Log level: off, error, warn, info, debug, or trace.
    #[arg(long, global = true, value_name = "LEVEL")]
    log: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded fractal dataset (PCB files plus manifest.csv).
    GenFractal(cmd::gen::Args),
    /// Train the folding autoencoder on a manifest of point clouds.
    TrainAe(cmd::train::Args),
    /// Encode every manifest item with a frozen checkpoint into a latent bank.
    Extract(cmd::extract::Args),
    /// Fit one one-class model on every row of a latent bank.
    Fit(cmd::fit::Args),
    /// Score a latent bank under a fitted model (higher = more anomalous).
    Score(cmd::score::Args),
    /// Run the leave-one-class-out protocol for a single anomaly class.
    Evaluate(cmd::evaluate::Args),
    /// Run every class as the anomaly in turn and write the AUC report.
    Benchmark(cmd::benchmark::Args),
    /// Project a latent bank onto its two leading principal axes.
    Project(cmd::project::Args),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they print to stdout and
            // succeed, while real parse failures are usage errors.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(Path::new(path))?,
        None => FileConfig::empty(),
    };
    let mut r = Resolver::new(file);

    // The logger must exist before anything resolves (resolution logs), so
    // the log level is settled first, straight from flag or raw file value.
    let level_str = match cli.log {
        Some(s) => s,
        None => r.take_raw("log").unwrap_or_else(|| "info".into()),
    };
    let level = LevelFilter::from_str(&level_str).map_err(|_| {
        CliError::Usage(format!(
            "unknown log level {level_str:?}; expected off, error, warn, info, debug, or trace"
        ))
    })?;
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
    r.note("log", &level_str);

    if let Some(n) = r.global_usize("threads", cli.threads)? {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
        r.note("threads", n);
    }

    match cli.command {
        Command::GenFractal(args) => cmd::gen::run(args, &mut r),
        Command::TrainAe(args) => cmd::train::run(args, &mut r),
        Command::Extract(args) => cmd::extract::run(args, &mut r),
        Command::Fit(args) => cmd::fit::run(args, &mut r),
        Command::Score(args) => cmd::score::run(args, &mut r),
        Command::Evaluate(args) => cmd::evaluate::run(args, &mut r),
        Command::Benchmark(args) => cmd::benchmark::run(args, &mut r),
        Command::Project(args) => cmd::project::run(args, &mut r),
    }
}
