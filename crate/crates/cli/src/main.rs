//! `choquet`: Choquet integrals, Kantorovich–Choquet operators and error
//! bound checks from the command line.
//!
//! Exit codes: 0 success, 1 a checked property or bound failed, 2 invalid
//! usage or input.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "choquet", version, about = "Choquet integration and Kantorovich-Choquet operators")]
struct Cli {
    /// Worker threads [default: one per core]
    #[arg(long, global = true, env = "CHOQUET_WORKERS")]
    workers: Option<usize>,

    /// JSON file with default settings; flags override it
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate an expression against a distorted Lebesgue capacity
    Integrate(IntegrateArgs),
    /// Evaluate an operator family on a grid of points
    Operator(OperatorArgs),
    /// Compare operator errors with the modulus-of-continuity bound
    Korovkin(KorovkinArgs),
    /// Run the randomized property and inequality suites
    Properties(PropertiesArgs),
    /// Show a distortion's capacity, its dual and domination constant
    Capacity(CapacityArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the result here instead of stdout
    #[arg(short, long, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    /// Integrand in t, e.g. "abs(t-0.5)"
    #[arg(short = 'f', long = "function", value_name = "EXPR")]
    pub function: Option<String>,

    /// identity | power:<alpha> | moebius | table:<path> [default: identity]
    #[arg(short, long)]
    pub distortion: Option<String>,

    /// Interval of integration [default: 0 1]
    #[arg(short, long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    pub interval: Option<Vec<f64>>,

    /// Grid cells used to sample the integrand [default: 1000]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Level-axis subdivisions of the quadrature oracle [default: 4096]
    #[arg(long)]
    pub level_grid: Option<usize>,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    /// bernstein | szasz | baskakov
    #[arg(short = 'F', long)]
    pub family: Option<String>,

    /// Degree n
    #[arg(short)]
    pub n: Option<usize>,

    /// identity | power:<alpha> | moebius | table:<path> [default: identity]
    #[arg(short, long)]
    pub distortion: Option<String>,

    /// Function in t
    #[arg(short = 'f', long = "function", value_name = "EXPR")]
    pub function: Option<String>,

    /// Number of evaluation points [default: 101]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Range of the evaluation points [default: 0 1]
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub window: Option<Vec<f64>>,

    /// Right end B of the data window [0, B] for szasz and baskakov
    /// [default: just large enough]
    #[arg(long, value_name = "B")]
    pub domain_max: Option<f64>,

    /// Samples per cell for the cell means [default: 64]
    #[arg(long)]
    pub samples_per_cell: Option<usize>,

    /// Weight left out by truncation, in (0, 1e-3] [default: 1e-12]
    #[arg(long)]
    pub tail_tolerance: Option<f64>,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct KorovkinArgs {
    /// Nonnegative function in t
    #[arg(short = 'f', long = "function", value_name = "EXPR")]
    pub function: Option<String>,

    /// identity | power:<alpha> | moebius | table:<path> [default: identity]
    #[arg(short, long)]
    pub distortion: Option<String>,

    /// bernstein | szasz | baskakov [default: bernstein]
    #[arg(short = 'F', long)]
    pub family: Option<String>,

    /// Constant c with nu <= c * dual(nu) [default: estimated]
    #[arg(short, long)]
    pub c: Option<f64>,

    /// Degrees, comma separated [default: 1,2,4,8,16,32,64]
    #[arg(short, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,

    /// Number of evaluation points [default: 51]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Range of the evaluation points [default: 0 1]
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub window: Option<Vec<f64>>,

    /// Right end B of the data window for szasz and baskakov
    #[arg(long, value_name = "B")]
    pub domain_max: Option<f64>,

    /// Cells per unit length for the modulus of continuity [default: 1000]
    #[arg(long)]
    pub modulus_grid: Option<usize>,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct PropertiesArgs {
    /// [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,

    /// Trials per suite [default: 200]
    #[arg(long)]
    pub trials: Option<usize>,

    /// identity | power:<alpha> | moebius | table:<path> [default: identity]
    #[arg(short, long)]
    pub distortion: Option<String>,

    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CapacityArgs {
    /// identity | power:<alpha> | moebius | table:<path>
    #[arg(short, long)]
    pub distortion: Option<String>,

    /// Points of the table on [0, 1] [default: 11]
    #[arg(long)]
    pub grid: Option<usize>,

    /// Grid used to estimate c [default: 10000]
    #[arg(long)]
    pub c_grid: Option<usize>,

    #[command(flatten)]
    pub out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new().num_threads(workers).build_global()?;
    }
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Integrate(args) => commands::integrate(args, &cfg),
        Command::Operator(args) => commands::operator(args, &cfg),
        Command::Korovkin(args) => commands::korovkin(args, &cfg),
        Command::Properties(args) => commands::properties(args, &cfg),
        Command::Capacity(args) => commands::capacity(args, &cfg),
    }
}
