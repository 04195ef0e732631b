//! The `rashba-qes` command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{
    run_spectrum, run_sweep, run_validate, run_verify, sample_params, verification_report, CheckStatus,
    VerificationReport, QES_ROOTS_CSV_HEADER, SWEEP_CSV_HEADER,
};
pub use config::{load_params, ParamSource, RunConfig, SweepAxis, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NONCONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rashba-qes", version, about = "QES spectrum of a Rashba quantum dot, with a brute-force oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Oracle spectrum, QES roots, determinants and their validation.
    Spectrum(CommonArgs),
    /// Match QES roots against the converged spectrum.
    Validate(CommonArgs),
    /// Algebra, double-build, generator and determinant checks.
    Verify(VerifyArgs),
    /// QES roots and oracle gaps along one parameter axis.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Frequency ratio ω_c/ω, e.g. `1/2` or `0.5`.
    #[arg(long)]
    pub r: Option<String>,
    /// Zeeman strength gμB/(2ħω).
    #[arg(long)]
    pub b: Option<String>,
    /// Rashba coupling in units of ħω.
    #[arg(long)]
    pub kappa: Option<String>,
    /// JSON file with a `physical` or `dimensionless` parameter group.
    #[arg(long, value_name = "FILE")]
    pub physical: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 2)]
    pub jmax: u32,
    #[arg(long, default_value_t = 160)]
    pub nmax_cap: usize,
    /// Relative convergence tolerance of the oracle.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Minimum number of levels tracked per sector.
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// `axis:start:end:points` with axis one of kappa, r, b.
    #[arg(long)]
    pub sweep: String,
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Spectrum(a) => run_spectrum(&a),
        Command::Validate(a) => run_validate(&a),
        Command::Verify(a) => run_verify(&a),
        Command::Sweep(a) => run_sweep(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

pub fn exit_code_for(e: &crate::Error) -> i32 {
    use crate::Error::*;
    match e {
        Consistency(_) => EXIT_MISMATCH,
        _ => EXIT_CONFIG,
    }
}
