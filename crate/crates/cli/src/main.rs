mod commands;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{
    BenchArgs, DegreesArgs, PinvArgs, RegressArgs, ReorderArgs, SvdArgs, SynthArgs,
};

#[derive(Parser)]
#[command(name = "fastpi", version, about = "Low-rank pseudoinverses of sparse feature matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hub-removal reordering of a feature matrix.
    Reorder(ReorderArgs),
    /// Truncated SVD with one of the three methods.
    Svd(SvdArgs),
    /// Factored pseudoinverse computed with the reordering pipeline.
    Pinv(PinvArgs),
    /// Multi-label regression with train/test split and P@k evaluation.
    Regress(RegressArgs),
    /// Reconstruction error per method and rank ratio.
    BenchError(BenchArgs),
    /// Wall-clock time per method and rank ratio, with per-stage breakdown.
    BenchTime(BenchArgs),
    /// Synthetic power-law matrix (optionally with planted labels).
    Synth(SynthArgs),
    /// Degree histograms of the bipartite instance/feature graph.
    Degrees(DegreesArgs),
}

/// Failures, split by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Lib(fastpi::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => f.write_str(msg),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<fastpi::Error> for Failure {
    fn from(e: fastpi::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Lib(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Reorder(a) => commands::reorder(a),
        Command::Svd(a) => commands::svd(a),
        Command::Pinv(a) => commands::pinv(a),
        Command::Regress(a) => commands::regress(a),
        Command::BenchError(a) => commands::bench_error(a),
        Command::BenchTime(a) => commands::bench_time(a),
        Command::Synth(a) => commands::synth(a),
        Command::Degrees(a) => commands::degrees(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
