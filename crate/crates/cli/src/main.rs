//! Single-binary front end: analyze graphs, decide matrix realizability,
//! run the ultrametric toolchain and drive the search harness.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 theorem-verification
//! failure, 3 internal numerical failure.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cutspectra::Tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonOpts {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    /// Comparison tolerance (absolute and relative); falls back to the
    /// CUTSPECTRA_TOL environment variable, then 1e-9
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized scans
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for the scans (default: available parallelism)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Directory for emitted files (trees, violating graphs)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "cutspectra", version, about = "Edge-connectivity matrices: cuts, spectra, realizability")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full report for a graph: connectivity matrix, flow tree, spectrum,
    /// energy bounds, quotient decomposition
    Analyze {
        /// Edge-list file (header n, then "u v w" lines)
        graph: PathBuf,
    },
    /// Emit the flow-equivalent tree of a graph
    Tree { graph: PathBuf },
    /// Realizability and terrace structure of a symmetric matrix
    CheckMatrix { matrix: PathBuf },
    /// Build a weighted tree realizing a matrix as its connectivity matrix
    Realize { matrix: PathBuf },
    /// Row-equivalence classes and the equitable quotient of a matrix
    Quotient { matrix: PathBuf },
    /// Ultrametric verdict, quotient analogue and smallest-eigenvalue bound
    Ultrametric {
        /// Matrix file, or an edge-list file with --graph
        input: PathBuf,
        /// Treat the input as a graph and analyze the reciprocal of its
        /// connectivity matrix
        #[arg(long)]
        graph: bool,
    },
    /// Scan small graphs: verify the connectivity-matrix theorems in bulk
    /// and hunt for vertex-connectivity counterexamples
    Search {
        /// Largest vertex count scanned exhaustively (vertex scan; the
        /// edge-theorem scan clamps at 7)
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// Vertex checks to run (energy-bound, path-degree-psd,
        /// min-eig-n-minus-1, min-eig-n-plus-1); default all
        #[arg(long)]
        checks: Vec<String>,
        /// Random weighted graphs for the edge-theorem scan
        #[arg(long, default_value_t = 500)]
        trials: u64,
        /// Skip the vertex-conjecture scan
        #[arg(long)]
        skip_vertex: bool,
        /// Skip the edge-theorem scan
        #[arg(long)]
        skip_edge: bool,
        /// Run the checks on one specific graph file instead of scanning
        #[arg(long)]
        graph: Option<PathBuf>,
    },
}

/// Failures mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// exit 1: bad arguments, unreadable or malformed input
    Usage(String),
    /// exit 2: a proven statement failed to verify on this input
    Theorem(String),
    /// exit 3: internal numerical trouble (no convergence, certificate mismatch)
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Theorem(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Theorem(m) | CliError::Numerical(m) => m,
        }
    }
}

fn resolve_tol(opts: &CommonOpts) -> Result<Tol, CliError> {
    let value = match opts.tol {
        Some(t) => Some(t),
        None => match std::env::var("CUTSPECTRA_TOL") {
            Ok(s) => Some(
                s.parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("CUTSPECTRA_TOL is not a number: {s}")))?,
            ),
            Err(_) => None,
        },
    };
    match value {
        Some(t) if t > 0.0 && t.is_finite() => Ok(Tol::from_scalar(t)),
        Some(t) => Err(CliError::Usage(format!("tolerance must be positive and finite, got {t}"))),
        None => Ok(Tol::default()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own help/version output is a success path
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let tol = match resolve_tol(&cli.common) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.code());
        }
    };
    if let Some(workers) = cli.common.workers {
        if workers == 0 {
            eprintln!("error: worker count must be at least 1");
            return ExitCode::from(1);
        }
        // ignore failure: the global pool can only be set once
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    match commands::run(&cli, tol) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
