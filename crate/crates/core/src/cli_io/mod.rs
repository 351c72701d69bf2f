//! Command-line entry points, run configuration, CSV/JSON output and
//! reproducibility manifests.
//!
//! Exit codes: `0` success, `1` I/O or record error, `2` usage or
//! validation error, `3` blow-up, `4` a plan check failed.

mod commands;
mod config;
mod csv;
mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_run, cmd_sample_noise, cmd_study};
pub use config::RunConfig;
pub use csv::{format_float, norms_to_csv, table_to_csv};
pub use manifest::{sha256_hex, write_atomic, OutputEntry, RunManifest};

use crate::experiments::StudyKind;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_CHECKS_FAILED: i32 = 4;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "WICKNLS_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "wicknls-out";

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Config(_) => EXIT_USAGE,
        Error::BlowUp { .. } => EXIT_BLOWUP,
        Error::Io { .. } | Error::Format(_) => EXIT_IO,
    }
}

#[derive(Debug, Parser)]
#[command(name = "wicknls", version, about = "NLS with a renormalized white-noise potential on the 2-torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a white-noise realization and write it as a binary record.
    SampleNoise(SampleNoiseArgs),
    /// Run one solve and write its per-frame norms.
    Run(RunArgs),
    /// Run a Monte Carlo study described by a plan file.
    Study(StudyArgs),
}

#[derive(Debug, Args)]
pub struct SampleNoiseArgs {
    #[arg(long)]
    pub seed: u64,
    /// Lattice half-width K.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4096))]
    pub lattice: u64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Output file; defaults to `noise_s<seed>_k<K>.bin` in the output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long)]
    pub plan: PathBuf,
    /// One of epsilon, modulus, bounds, strichartz, dispersive.
    #[arg(long)]
    pub study: StudyKind,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
    pub out: PathBuf,
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::SampleNoise(a) => cmd_sample_noise(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Study(a) => cmd_study(&a),
    }
}
