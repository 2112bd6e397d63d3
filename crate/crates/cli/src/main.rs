mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "tpower", version, about = "Truncated power method for sparse eigenproblems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One sparse eigenvector of a covariance matrix or data set.
    Eig(EigArgs),
    /// Several sparse components with projection deflation.
    Spca(SpcaArgs),
    /// Densest k-subgraph of an edge list.
    Dks(DksArgs),
    /// Write a synthetic instance and its ground truth.
    Synth(SynthArgs),
    /// Run the lemma and recovery-bound suites.
    Verify(VerifyArgs),
    /// Time single-component extractions over a grid of k and seeds.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    /// Square matrix: Matrix Market (.mtx) or CSV.
    Covariance,
    /// CSV with one sample per row.
    Data,
    /// Edge list.
    Graph,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    Diag,
    DiagSet,
    Warm,
    Backward,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftArg {
    None,
    Auto,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Tpower,
    Feige,
    Ravi,
    Relaxed,
    /// TPower-DkS, Greedy-Feige and Greedy-Ravi side by side.
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthKind {
    Spiked,
    Planted,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchKind {
    Gaussian,
    Spiked,
}

#[derive(Args, Debug, Serialize)]
pub struct InputArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "covariance")]
    pub input_kind: InputKind,
    /// CSV input starts with a header row.
    #[arg(long)]
    pub header: bool,
    /// Center data columns before forming the covariance.
    #[arg(long)]
    pub center: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value = "diag")]
    pub init: InitArg,
    #[arg(long, value_enum, default_value = "none")]
    pub shift: ShiftArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct EigArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Smallest k-sparse eigenvalue instead of the largest.
    #[arg(long)]
    pub smallest: bool,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SpcaArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Per-component cardinalities, e.g. 7-2-1-1-1-1.
    #[arg(long, value_parser = parse_cardinalities)]
    pub cardinalities: Cardinalities,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DksArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Treat each line as an arc and symmetrize.
    #[arg(long)]
    pub directed: bool,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "tpower")]
    pub method: MethodArg,
    /// Extract this many disjoint subgraphs in sequence.
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Dimension (spiked) or vertex count (planted).
    #[arg(long)]
    pub p: usize,
    /// Sample count (spiked).
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    /// Planted set size.
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    #[arg(long, default_value_t = 0.8)]
    pub p_in: f64,
    #[arg(long, default_value_t = 0.05)]
    pub p_out: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    /// Directory receiving the instance and truth.json.
    #[arg(long)]
    #[serde(skip)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Draws per lemma suite.
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    /// Instances for the recovery-bound suite.
    #[arg(long, default_value_t = 100)]
    pub instances: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    pub synth: BenchKind,
    #[arg(long)]
    pub p: usize,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Cardinality as a fraction of p; repeat for a grid.
    #[arg(long, default_value = "0.1")]
    pub k_frac: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
pub struct Cardinalities(pub Vec<usize>);

fn parse_cardinalities(s: &str) -> Result<Cardinalities, String> {
    s.split('-')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .filter(|k| *k > 0)
                .ok_or_else(|| format!("{t:?} is not a positive cardinality"))
        })
        .collect::<Result<_, _>>()
        .map(Cardinalities)
}

/// Failure of a subcommand, mapped to an exit code.
pub enum Failure {
    Usage(String),
    Solver(tpower::Error),
    /// A verification suite reported violations.
    Verification(String),
}

impl From<tpower::Error> for Failure {
    fn from(e: tpower::Error) -> Self {
        Failure::Solver(e)
    }
}

fn error_record(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", error_record("usage", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Eig(a) => commands::eig(&a),
        Command::Spca(a) => commands::spca(&a),
        Command::Dks(a) => commands::dks(&a),
        Command::Synth(a) => commands::synth(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Bench(a) => commands::bench(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("{}", error_record("usage", &m));
            ExitCode::from(2)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("{}", error_record("verification-failed", &m));
            ExitCode::from(1)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("{}", error_record(e.kind(), &e.to_string()));
            ExitCode::from(1)
        }
    }
}
