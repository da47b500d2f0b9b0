//! Command-line front end for `negmono-core`.
//!
//! Each subcommand writes its dataset to `--out` and prints `KEY=VALUE`
//! summary lines on standard output. Exit codes: 0 on success, 1 when a
//! checked invariant or the verification suite fails, 2 on usage or input
//! errors.

mod commands;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use negmono_core::boundary::ON_BOUNDARY_TOL;
use negmono_core::linalg::configure_eig_tol;

pub use verify::{Suite, MANIFEST};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Seed used when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(
    name = "negmono",
    version,
    about = "Negativity monogamy for three-party pure states"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Worker threads (defaults to the machine's parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Radial tolerance for on-boundary classification and search findings.
    #[arg(long, global = true, default_value_t = ON_BOUNDARY_TOL)]
    pub tol: f64,

    /// Jacobi stopping threshold, relative to the Frobenius norm [default: 1e-13].
    #[arg(long = "eig-tol", global = true)]
    pub eig_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Haar-random triples (negativity, plus concurrence for qubits).
    Sample(SampleArgs),
    /// Parametric boundary triples with the implicit-surface residual.
    Boundary(BoundaryArgs),
    /// Oracle-equivalence and residual checks over every operation.
    Verify(VerifyArgs),
    /// Perturbation search for triples beyond the boundary.
    Search(SearchArgs),
    /// Closed-form triples of the qudit family on an (a, b) grid.
    Qudit(QuditArgs),
    /// Triples of the swap-rotated qudit family on a (d, theta) grid.
    SwapScan(SwapScanArgs),
    /// Constant-z^2 region-filling sweep in c.
    Fill(FillArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Local dimension of each party.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..=8))]
    pub dims: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
    pub format: OutFormat,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    /// Points per axis of the polar (a, b) grid.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Local dimension (2 for qubits).
    #[arg(long = "D", default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..=4))]
    pub dim: u64,
    /// Number of boundary states to start from.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub bases: u64,
    /// Trials per base state.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Initial perturbation size.
    #[arg(long, default_value_t = 1e-2)]
    pub step: f64,
    /// JSON findings report.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QuditArgs {
    #[arg(long = "D", default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..=4096))]
    pub dim: u64,
    /// Points per axis of the polar (a, b) grid.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
    /// Write N rather than N^2.
    #[arg(long)]
    pub unsquared: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SwapScanArgs {
    #[arg(long = "D", default_value_t = 3, value_parser = clap::value_parser!(u64).range(2..=4096))]
    pub dim: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..))]
    pub grid: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FillArgs {
    /// Squared A|BC negativity of the slice, in (0, 1).
    #[arg(long = "z-sq")]
    pub z_sq: f64,
    /// Number of c values from 0 to its maximum.
    #[arg(long = "n-c", default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    pub n_c: u64,
    /// Points per curve.
    #[arg(long, default_value_t = 128, value_parser = clap::value_parser!(u64).range(2..))]
    pub points: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(tol) = config.eig_tol {
        if let Err(e) = configure_eig_tol(tol) {
            eprintln!("error: --eig-tol: {e}");
            return EXIT_USAGE;
        }
    }
    if !(config.tol.is_finite() && config.tol >= 0.0) {
        eprintln!(
            "error: --tol must be a finite non-negative number, got {}",
            config.tol
        );
        return EXIT_USAGE;
    }

    let outcome = match config.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&config)),
            Err(e) => {
                eprintln!("error: cannot start {n} worker threads: {e}");
                return EXIT_USAGE;
            }
        },
        None => commands::dispatch(&config),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}
