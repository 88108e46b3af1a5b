//! `eigprog`: inverse eigenvalue campaigns, ellipsoid trajectories and generic
//! spectral feasibility solves.

mod commands;
mod format;
mod schema;
mod svg;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use schema::{OrderingSpec, SolverSpec};

#[derive(Debug, Parser)]
#[command(name = "eigprog", version, about = "Eigenvalue programming over FTvN systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random inverse eigenvalue campaign; writes iep_results.csv.
    Iep(IepArgs),
    /// Ellipsoid intersection from several starts; writes trajectory_<i>.csv.
    Ellipsoids(EllipsoidArgs),
    /// Generic feasibility solve from a problem file; writes solve_report.json.
    Solve(SolveArgs),
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Constant step size in (0, 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Stop once dist(x_k, affine set) is at most this.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long = "restart-cap")]
    restart_cap: Option<usize>,
}

impl SolverArgs {
    fn spec(&self) -> SolverSpec {
        SolverSpec {
            alpha: self.alpha,
            tol: self.tol,
            max_iter: self.max_iter,
            restart_cap: self.restart_cap,
        }
    }
}

#[derive(Debug, Args)]
struct IepArgs {
    /// Number of symmetric-matrix blocks.
    #[arg(long)]
    l: usize,
    /// Number of second-order-cone blocks.
    #[arg(long)]
    m: usize,
    /// Block size.
    #[arg(long)]
    n: usize,
    /// Span ratios; d = floor(dim·rho) per value.
    #[arg(long, value_delimiter = ',', required_unless_present = "d")]
    rho: Vec<f64>,
    /// Explicit span dimensions, used instead of --rho.
    #[arg(long, value_delimiter = ',', conflicts_with = "rho")]
    d: Vec<usize>,
    #[arg(long, value_enum, default_value = "blockwise")]
    ordering: OrderingSpec,
    /// Instances per row.
    #[arg(long, default_value_t = 10)]
    seeds: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EllipsoidArgs {
    /// Problem file with an `ellipsoids` section and `starts`.
    #[arg(long)]
    instance: PathBuf,
    /// Override the tight count of the file.
    #[arg(long)]
    l: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write plot.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Problem file with `algebra`, `affine`, `constraint` and `starts`.
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, malformed files or unwritable outputs.
    Config(String),
    /// A numerical failure inside the solver.
    Solver(eigprog::Error),
}

impl CliError {
    pub fn config(e: impl fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        CliError::Config(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
        }
    }
}

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RESTART_BUDGET: u8 = 3;
pub const EXIT_ALL_STALLED: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Iep(a) => commands::iep(&a),
        Command::Ellipsoids(a) => commands::ellipsoids(&a),
        Command::Solve(a) => commands::solve(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("eigprog: {e}");
            ExitCode::from(match e {
                CliError::Config(_) => EXIT_CONFIG,
                CliError::Solver(_) => 1,
            })
        }
    }
}
