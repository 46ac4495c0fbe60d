//! Command-line front end for the rigidcol bound engine and graph lab.
//!
//! The binary is a thin wrapper over [`run`]; the argument types and the
//! record format live here so that tests can drive and parse them.

pub mod commands;
pub mod record;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rigidcol::model::DEFAULT_X_MAX;
use rigidcol::solver::{SolveMethod, DEFAULT_TOL_RESIDUAL};
use rigidcol::Error;

#[derive(Debug, Parser)]
#[command(name = "rigidcol", version, about = "First-moment bound on random graph 3-colourability")]
pub struct Cli {
    /// Emit one JSON object per record instead of key-value lines.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Method {
    Nested,
    Spiral,
}

impl From<Method> for SolveMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Nested => SolveMethod::NestedBisection,
            Method::Spiral => SolveMethod::Spiral,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Degree truncation.
    #[arg(long = "xmax", default_value_t = DEFAULT_X_MAX)]
    x_max: usize,

    /// Convergence threshold on the residuals of the spread system.
    #[arg(long = "residual-tol", default_value_t = DEFAULT_TOL_RESIDUAL)]
    residual_tol: f64,

    #[arg(long, value_enum, default_value_t = Method::Nested)]
    method: Method,

    /// Tie the third spread to 1 instead of the truncated first moment U(xmax).
    #[arg(long)]
    unit_total: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the spread system at one density and evaluate the bound F(c).
    Bound {
        #[arg(long)]
        c: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Smallest density in the working range with F(c) < 1.
    Threshold {
        /// Width of the final bisection bracket on c.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// F(c) and the spreads on an equispaced grid of densities (CSV).
    Scan {
        #[arg(long, default_value_t = 2.40)]
        c_lo: f64,
        #[arg(long, default_value_t = 2.50)]
        c_hi: f64,
        #[arg(long, default_value_t = 21)]
        steps: usize,
        /// Dump y0,y1,K0,K1 over the admissible box at --c instead, with
        /// --steps points per axis.
        #[arg(long)]
        grid_mode: bool,
        /// Density for --grid-mode.
        #[arg(long, default_value_t = 2.468155)]
        c: f64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Sample a random multigraph and write it in the text graph format.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Exact proper and rigid colouring counts of a graph file.
    RigidCount { path: std::path::PathBuf },
    /// Monte Carlo estimate of the restricted first moment E[R(G)·1{G in subspace}].
    Mc {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Density defining the Poisson degree profile; defaults to m / n.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long = "xmax", default_value_t = 8)]
        x_max: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Core(e) => match e {
                Error::Parameter(_) | Error::Domain(_) => 2,
                Error::Bracket(_) => 3,
                Error::Monotonicity { .. } => 4,
                Error::Convergence { .. } => 5,
                Error::Parse { .. } => 6,
                Error::Capacity { .. } => 7,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(msg) => write!(f, "I/O error: {msg}"),
        }
    }
}


pub use commands::run;
