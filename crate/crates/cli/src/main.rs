use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use resdist::experiment::{self, ExperimentConfig, ExperimentKind};
use resdist::Error;

/// Identify and suppress unknown disturbances with a reservoir computer.
#[derive(Parser)]
#[command(name = "resdist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on a known forcing and estimate a disturbance from observations.
    Identify(RunArgs),
    /// Run one closed-loop suppression.
    Suppress(RunArgs),
    /// Sweep the control gain and report the attractor distance d(α).
    Sweep(RunArgs),
    /// Train and infer on recorded CSV data.
    IdentifyExternal(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config or a manifest from a previous run; built-in
    /// defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DIVERGED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Identify(a) => (ExperimentKind::Identify, a),
        Command::Suppress(a) => (ExperimentKind::Suppress, a),
        Command::Sweep(a) => (ExperimentKind::Sweep, a),
        Command::IdentifyExternal(a) => (ExperimentKind::IdentifyExternal, a),
    };
    match execute(kind, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Grid { .. } | Error::SeriesMismatch(_) | Error::Dimension { .. } => EXIT_CONFIG,
        Error::Divergence { .. } => EXIT_DIVERGED,
        _ => EXIT_FAILURE,
    }
}

fn execute(kind: ExperimentKind, args: &RunArgs) -> Result<ExitCode, Error> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path).map_err(|e| match e {
            Error::Io(io) => Error::config(format!("cannot read {}: {io}", path.display())),
            other => other,
        })?,
        None => ExperimentConfig::new(kind),
    };
    if cfg.experiment != kind {
        return Err(Error::config(format!(
            "config describes a `{}` experiment but `{}` was requested",
            cfg.experiment.as_str(),
            kind.as_str()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = experiment::run(&cfg, &args.out)?;
    println!("{:#}", out.summary);
    eprintln!("wrote {} artifacts to {}", out.artifacts.len() + 1, out.dir.display());
    if let Some(step) = out.diverged_at {
        eprintln!("closed loop diverged at step {step}");
        return Ok(ExitCode::from(EXIT_DIVERGED));
    }
    Ok(ExitCode::SUCCESS)
}
