//! `jwdiscord`: spectra, discord matrices, polarization and noise sweeps and
//! the oracle self-test, written as CSV or JSON with a metadata sidecar.

mod config;
mod output;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use config::{Experiment, Flags};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] jw_discord::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Core(_) => "computation",
            Self::Io { .. } => "io",
            Self::VerifyFailed { .. } => "verify",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "jwdiscord", version, about = "Pairwise discord of XY-chain eigenmode fermions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Mode wavenumbers and energies.
    Spectrum,
    /// Pairwise discord of every mode pair at t = 0.
    DiscordMatrix,
    /// Cluster spread functions against the parasitic polarization b.
    SweepB,
    /// Realization-averaged spread functions against the noise amplitude.
    SweepNoise,
    /// Compare the analytic pipeline with the exact small-chain oracle.
    Verify,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Spectrum => Experiment::Spectrum,
            Command::DiscordMatrix => Experiment::DiscordMatrix,
            Command::SweepB => Experiment::SweepB,
            Command::SweepNoise => Experiment::SweepNoise,
            Command::Verify => Experiment::Verify,
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.flags.resolve(cli.command.into())?;
    log::debug!("resolved config {cfg:?}");
    let outcome = run::run(&cfg)?;
    let header = output::Header::for_config(&cfg);
    let body = output::render(&outcome.table, &header, cfg.format);
    let meta = output::metadata(&cfg, &header, outcome.results);
    let sidecar = output::sidecar_path(&cfg.output);
    output::write_all_atomic(&[(&cfg.output, &body), (&sidecar, &meta)])?;
    if outcome.failed_checks > 0 {
        return Err(CliError::VerifyFailed {
            failed: outcome.failed_checks,
            total: outcome.table.rows.len(),
        });
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(e.exit_code())
        }
    }
}
