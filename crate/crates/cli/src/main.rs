//! `bdlab`: exact engines, enumeration oracle and Monte Carlo ensembles
//! for roots and gaps of one-dimensional ballistic deposition.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! configuration error, 3 a resource guard refused the request.

mod commands;
mod output;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use bdlab_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bdlab",
    version,
    about = "Roots and gaps of 1-D ballistic deposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Seeded Monte Carlo ensemble.
    Simulate(SimulateArgs),
    /// Exact law of the root count from the generating-function recursion.
    ExactRoots(ExactRootsArgs),
    /// Exact law of gap counts D_{i,K} from the gap recursion.
    ExactGaps(ExactGapsArgs),
    /// Exact laws by enumerating all K! first-hit orders (K <= 10).
    Oracle(OracleArgs),
    /// Run the built-in exact-equality suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Ord, PartialOrd, ValueEnum)]
pub enum Stat {
    Roots,
    Gaps,
    EmpiricalAverage,
    HeightGrowth,
}

impl std::str::FromStr for Stat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, false)
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` file; flags given on the command line win.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Strip width (K >= 3).
    #[arg(long = "K", value_name = "K")]
    pub width: Option<usize>,
    /// Boundary rule: cyclic or aux.
    #[arg(long)]
    pub mode: Option<bdlab_core::BoundaryMode>,
    #[arg(long)]
    pub runs: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Statistic to record; repeatable.
    #[arg(long = "stat", value_enum)]
    pub stats: Vec<Stat>,
    /// Gap length for `--stat gaps`; repeatable.
    #[arg(long = "i", value_name = "I")]
    pub gaps: Vec<usize>,
    /// Deposition steps per run for `--stat height-growth`.
    #[arg(long)]
    pub n_steps: Option<u64>,
    /// Run the full height dynamics instead of the first-hit permutation.
    #[arg(long)]
    pub full_simulation: bool,
    /// Bins for real-valued histograms.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Also write two-column `<statistic>.dat` histogram files here.
    #[arg(long, value_name = "DIR")]
    pub gnuplot_dir: Option<PathBuf>,
    /// Include wall-clock runtime in the output (breaks byte-identity).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct ExactRootsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "K", value_name = "K")]
    pub width: Option<usize>,
    #[arg(long)]
    pub mode: Option<bdlab_core::BoundaryMode>,
}

#[derive(Debug, Args)]
pub struct ExactGapsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "K", value_name = "K")]
    pub width: Option<usize>,
    /// Gap length; repeatable.
    #[arg(long = "i", value_name = "I")]
    pub gaps: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "K", value_name = "K")]
    pub width: Option<usize>,
    #[arg(long)]
    pub mode: Option<bdlab_core::BoundaryMode>,
    /// Gap length to report (cyclic only); repeatable. Default: all.
    #[arg(long = "i", value_name = "I")]
    pub gaps: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// roots, gaps, tables, oracle or all.
    #[arg(long)]
    pub suite: Option<bdlab_core::verify::Suite>,
    #[arg(long)]
    pub kmax: Option<usize>,
}

/// A message plus the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Self::config(format!("cannot write {}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_resource() { 3 } else { 2 };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::ExactRoots(a) => commands::exact_roots(a),
        Command::ExactGaps(a) => commands::exact_gaps(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("bdlab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
