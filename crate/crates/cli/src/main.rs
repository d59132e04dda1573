//! `probverif`: decide `P[f(X) > 0] >= eta` for ReLU networks under
//! Gaussian input noise.
//!
//! Exit codes: 0 TRUE, 1 FALSE, 2 TIMEOUT or undecided, 3 usage or input
//! error.

mod bench;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use probverif_core::Strategy;
use tracing_subscriber::EnvFilter;

pub const EXIT_TRUE: u8 = 0;
pub const EXIT_FALSE: u8 = 1;
pub const EXIT_UNDECIDED: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "probverif",
    version,
    about = "Probabilistic verification of ReLU networks under Gaussian noise"
)]
struct Cli {
    /// Log per-iteration progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify a problem file and print the report as JSON.
    Verify(VerifyArgs),
    /// Build a robustness problem for a classifier around a correctly
    /// classified input.
    MakeProblem(MakeProblemArgs),
    /// Run every problem in a directory under several strategies.
    Bench(BenchArgs),
    /// Estimate the probability of a problem by direct sampling.
    Oracle(OracleArgs),
    /// Write a corpus of random toy problems.
    ToyCorpus(ToyCorpusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyName {
    Ordered,
    BabsrProb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Bab,
    NoSplit,
    Oracle,
}

/// Engine settings shared by `verify` and `bench`.
#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    /// Override the problem's probability threshold.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Uncertainty threshold for babsr-prob.
    #[arg(long, default_value_t = probverif_core::DEFAULT_TAU)]
    pub tau: f64,
    /// Monte Carlo samples per branch probability.
    #[arg(long, default_value_t = probverif_core::bab::DEFAULT_SAMPLES)]
    pub samples: u64,
    /// Largest per-branch sample count reached by confidence escalation.
    /// Defaults to 64 times `--samples`.
    #[arg(long)]
    pub max_samples: Option<u64>,
    /// Nested splits per popped branch.
    #[arg(long, default_value_t = 1)]
    pub split_depth: usize,
    /// Branches popped per iteration.
    #[arg(long, default_value_t = 1)]
    pub batch: usize,
    /// Seconds per instance; 0 disables the limit.
    #[arg(long, default_value_t = probverif_core::bab::DEFAULT_TIME_LIMIT_S)]
    pub time_limit: f64,
    #[arg(long, env = "PROBVERIF_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Override the truncation box half-width in standard deviations.
    #[arg(long)]
    pub z: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub problem: PathBuf,
    #[arg(long, value_enum, default_value_t = StrategyName::Ordered)]
    pub strategy: StrategyName,
    #[arg(long, value_enum, default_value_t = Mode::Bab)]
    pub mode: Mode,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Also write the report to this file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MakeProblemArgs {
    /// Classifier model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Center input, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub x0: Vec<f64>,
    /// Class the model must keep.
    #[arg(long)]
    pub target: usize,
    /// Competing class.
    #[arg(long)]
    pub attack: usize,
    /// Isotropic noise standard deviation.
    #[arg(long, group = "noise")]
    pub sigma: Option<f64>,
    /// Per-dimension variances, comma separated.
    #[arg(long, value_delimiter = ',', group = "noise")]
    pub cov_diag: Option<Vec<f64>>,
    /// Radius of the per-dimension 99.7% interval; sets sigma = r / 3.
    #[arg(long = "radius-99.7", group = "noise")]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 0.95)]
    pub eta: f64,
    #[arg(long, default_value_t = 3.0)]
    pub z: f64,
    /// Output problem file.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Directory of problem files.
    pub corpus: PathBuf,
    /// Configurations to run, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "ordered,babsr-prob,no-split"
    )]
    pub configs: Vec<String>,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Per-instance rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Rows and per-configuration aggregates as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub problem: PathBuf,
    /// Fixed sample count; by default 10^6, raised to 10^7 near the threshold.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, env = "PROBVERIF_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct ToyCorpusArgs {
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub count: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
}

impl StrategyName {
    pub fn with_tau(self, tau: f64) -> Strategy {
        match self {
            StrategyName::Ordered => Strategy::Ordered,
            StrategyName::BabsrProb => Strategy::BabsrProb { tau },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let default_level = if cli.verbose {
        "probverif_core=debug"
    } else {
        "warn"
    };
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new(default_level)),
        )
        .with_writer(std::io::stderr)
        .init();

    let result = match cli.command {
        Command::Verify(args) => commands::verify(&args),
        Command::MakeProblem(args) => commands::make_problem(&args),
        Command::Bench(args) => bench::run(&args),
        Command::Oracle(args) => commands::oracle(&args),
        Command::ToyCorpus(args) => commands::toy_corpus(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
