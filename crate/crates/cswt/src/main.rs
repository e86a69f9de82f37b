//! Command-line front end: filter generation, system bundles, certificate
//! verification, grid transforms, and complexity benchmarks.
//!
//! Exit codes: 0 success (verification passed), 1 runtime failure or a
//! failed verification, 2 usage or input-validation errors. Diagnostics go
//! to stderr; results (JSON, CSV, summaries) go to stdout or `--output`.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cswt",
    version,
    about = "Multivariate wavelet masks by coset sum: construction, verification, fast transforms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a refinement filter (optionally lifted to n dimensions) as
    /// canonical JSON
    Gen(GenArgs),
    /// Build a combined biorthogonal mask system bundle as JSON
    System(SystemArgs),
    /// Check a property and emit a JSON certificate
    Verify(VerifyArgs),
    /// Decompose a grid into a pyramid, or reconstruct a grid from one
    Transform(TransformArgs),
    /// Measure multiplicative operations per sample for the fast transforms
    Benchmark(BenchmarkArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Family {
    /// Haar refinement filter
    Haar,
    /// Piecewise-linear spline filter
    Spline1,
    /// Interpolatory filter of order `--order`
    Dd,
    /// Dual of the interpolatory filter, biorthogonal to it
    DdDual,
    /// Order-2 Daubechies filter (float mode only)
    Daub2,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum LiftOp {
    None,
    Cosetsum,
    Tensor,
    Hybrid,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Order 2k of the interpolatory family (even, >= 2)
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long, value_enum, default_value = "none")]
    pub op: LiftOp,
    /// Target dimension for a lifted filter
    #[arg(long)]
    pub dim: Option<usize>,
    /// JSON file with custom coset representatives, e.g. `[[0,0],[2,1],[1,2],[-1,1]]`
    #[arg(long)]
    pub gamma: Option<PathBuf>,
    /// Comma-separated block dimensions for --op hybrid, e.g. 2,1
    #[arg(long)]
    pub blocks: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct SystemArgs {
    /// Base family of the primal/dual pair (dd, haar, or daub2)
    #[arg(long, value_enum, default_value = "dd")]
    pub family: Family,
    #[arg(long)]
    pub order: Option<u32>,
    /// coset or tensor
    #[arg(long, default_value = "coset")]
    pub kind: String,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// interpolatory, biorthogonal, accuracy, moments, or muep
    #[arg(long)]
    pub check: String,
    /// Filter JSON input (primary mask)
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Filter JSON input (dual mask, for biorthogonal)
    #[arg(long)]
    pub dual: Option<PathBuf>,
    /// System bundle JSON input (for muep)
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Search cap for accuracy / moments
    #[arg(long, default_value_t = coset_wavelets::analysis::DEFAULT_ORDER_CAP)]
    pub cap: u32,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Direction {
    Decompose,
    Reconstruct,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Method {
    Coset,
    Tensor,
}

#[derive(Args)]
pub struct TransformArgs {
    #[arg(long, value_enum)]
    pub direction: Direction,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Univariate pair to use: dd (with --order), haar, or daub2
    #[arg(long, value_enum, default_value = "dd")]
    pub family: Family,
    #[arg(long)]
    pub order: Option<u32>,
    /// Decomposition depth (decompose only)
    #[arg(long)]
    pub levels: Option<u32>,
    /// Grid file (decompose) or pyramid directory (reconstruct)
    #[arg(long)]
    pub input: PathBuf,
    /// Pyramid directory (decompose) or grid file (reconstruct)
    #[arg(short, long)]
    pub output: PathBuf,
    /// exact computes in dyadic arithmetic internally (files stay f64)
    #[arg(long, value_enum, default_value = "float")]
    pub mode: Mode,
}

#[derive(Args)]
pub struct BenchmarkArgs {
    /// Comma-separated methods (coset, tensor)
    #[arg(long, default_value = "coset,tensor")]
    pub methods: String,
    /// Comma-separated dimensions
    #[arg(long, default_value = "2,3,4")]
    pub dims: String,
    /// Comma-separated interpolatory orders 2k
    #[arg(long, default_value = "4")]
    pub orders: String,
    /// Per-axis size, or "auto" for 2^(8-n)
    #[arg(long, default_value = "auto")]
    pub size: String,
    /// Decomposition depth, or "auto" for the full depth
    #[arg(long, default_value = "auto")]
    pub levels: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Failures carry the exit code policy: usage errors exit 2, runtime
/// failures exit 1. A failed verification is reported as `Ok(1)`.
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

pub type CliResult = Result<u8, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => commands::gen(&args),
        Command::System(args) => commands::system(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Transform(args) => commands::transform(&args),
        Command::Benchmark(args) => commands::benchmark(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
