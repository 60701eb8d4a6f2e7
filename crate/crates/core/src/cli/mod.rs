//! Command-line surface of the `spectra` binary.
//!
//! Exit codes: `0` success, `2` configuration error (unreadable or invalid
//! config, bad flags), `3` numerical failure (a module error, reported with
//! its message verbatim, or a missed verification threshold).
//!
//! Every run computes all artifacts in memory before writing anything, so a
//! configuration or module error leaves the output directory untouched.
//! Successful and threshold-failing runs append one line to
//! `manifest.jsonl` in the output directory.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod output;

use std::fs;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::error::SpectraError;
use manifest::RunManifest;
use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "spectra",
    version,
    about = "Rank-one perturbations, Clark measures, model spaces and Anderson models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::All)]
    pub format: Format,
    /// Overrides the seed of `anderson`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the subcommand's main tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Aronszajn-Donoghue decomposition of a rank-one perturbation.
    Ad,
    /// Clark measure of a rational Schur function.
    Clark,
    /// Inner-function indicators of a model space or a matrix contraction.
    Model,
    /// Verification report for the adjoint Clark operator.
    ClarkOp,
    /// Anderson-model ensemble.
    Anderson,
    /// Masses and support of a measure.
    MeasureInfo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ad => "ad",
            Command::Clark => "clark",
            Command::Model => "model",
            Command::ClarkOp => "clark-op",
            Command::Anderson => "anderson",
            Command::MeasureInfo => "measure-info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Module(#[from] SpectraError),
    #[error("{0}")]
    Check(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 3,
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{origin}: {e}")))
}

fn compute(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let (text, origin) = match &cli.config {
        Some(p) => (
            fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            p.display().to_string(),
        ),
        None if cli.command == Command::ClarkOp => {
            (config::DEFAULT_CLARK_OP_CORPUS.to_string(), "default corpus".into())
        }
        None => {
            return Err(CliError::Config(format!(
                "{} needs --config <path>",
                cli.command.name()
            )))
        }
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("--tol must be positive, got {t}")));
        }
    }
    match cli.command {
        Command::Ad => commands::ad(parse(&text, &origin)?, cli.tol),
        Command::Clark => commands::clark(parse(&text, &origin)?, cli.tol),
        Command::Model => commands::model(parse(&text, &origin)?, cli.tol),
        Command::ClarkOp => commands::clark_op(parse(&text, &origin)?, cli.tol),
        Command::Anderson => commands::anderson(parse(&text, &origin)?, cli.seed, cli.tol),
        Command::MeasureInfo => commands::measure_info(parse(&text, &origin)?),
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let started = Instant::now();
    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis());
    let (artifacts, verdict) = match compute(cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let verdict = verdict.map_err(CliError::Check);
    let exit_code = verdict.as_ref().err().map_or(0, CliError::exit_code);
    let written = (|| -> std::io::Result<Vec<String>> {
        fs::create_dir_all(&cli.out)?;
        let mut files = Vec::new();
        for a in artifacts.iter().filter(|a| cli.format.admits(a.kind)) {
            fs::write(cli.out.join(&a.name), &a.bytes)?;
            files.push(a.name.clone());
        }
        manifest::append(
            &cli.out,
            &RunManifest {
                subcommand: cli.command.name().into(),
                config: cli.config.as_ref().map(|p| p.display().to_string()),
                out: cli.out.display().to_string(),
                format: cli.format,
                version: env!("CARGO_PKG_VERSION").into(),
                seed: cli.seed,
                tol: cli.tol,
                files: files.clone(),
                started_unix_ms,
                elapsed_ms: started.elapsed().as_millis(),
                exit_code,
            },
        )?;
        Ok(files)
    })();
    match written {
        Ok(files) => {
            for f in files {
                println!("{}", cli.out.join(f).display());
            }
        }
        Err(e) => {
            let e = CliError::Io(e.to_string());
            eprintln!("{e}");
            return e.exit_code();
        }
    }
    if let Err(e) = verdict {
        eprintln!("{e}");
    }
    exit_code
}
