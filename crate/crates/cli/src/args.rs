//! Command-line surface of the `stefan` binary.

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "stefan",
    about = "One-dimensional melting-front solver: fixed-point runs, refinement studies, relaxation sweeps, variational refinement and residual reports",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the relaxed fixed-point iteration once; writes boundary.csv,
    /// field.csv and iterations.csv.
    Solve(SolveArgs),
    /// Refinement study over a ladder of grids; writes study.csv.
    Study(StudyArgs),
    /// Compare relaxation weights, including the undamped oscillation dump;
    /// writes operators.csv.
    Operators(OperatorsArgs),
    /// One linearized variational improvement of a front; writes refine.csv.
    Refine(RefineArgs),
    /// Flux-balance residual report of a converged front; writes residual.csv.
    Residual(ResidualArgs),
}

/// Options shared by every subcommand: problem selection, grid, iteration
/// controls, output location. Command-line flags override the JSON config.
#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// JSON run description (flags override its fields)
    #[arg(long, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,

    /// Built-in benchmark problem: i, ii or iii
    #[arg(long, value_name = "ID")]
    pub example: Option<String>,

    /// Oscillation amplitude of example iii (default 0.1)
    #[arg(long, value_name = "EPS")]
    pub eps: Option<f64>,

    /// Oscillation frequency of example iii (default 2*pi)
    #[arg(long, value_name = "OMEGA")]
    pub omega: Option<f64>,

    /// Custom Dirichlet heating g(t), e.g. "exp(t)-1"
    #[arg(long, value_name = "EXPR")]
    pub dirichlet_g: Option<String>,

    /// Custom Neumann flux magnitude q(t), e.g. "exp(t)"
    #[arg(long, value_name = "EXPR")]
    pub neumann_q: Option<String>,

    /// Latent-heat coefficient beta(x) (default "1")
    #[arg(long, value_name = "EXPR")]
    pub beta: Option<String>,

    /// Time horizon (default 1)
    #[arg(long, value_name = "T")]
    pub horizon: Option<f64>,

    /// Spatial step of the front-fixed grid (default 0.05)
    #[arg(long, value_name = "STEP")]
    pub dxi: Option<f64>,

    /// Time step (default: equal to the spatial step)
    #[arg(long, value_name = "STEP")]
    pub dt: Option<f64>,

    /// Relaxation weight in [0,1] (default 0.5)
    #[arg(long, value_name = "ALPHA")]
    pub alpha: Option<f64>,

    /// Sup-norm stopping tolerance (default 1e-6)
    #[arg(long, value_name = "TOL")]
    pub tol: Option<f64>,

    /// Iteration cap (default 200)
    #[arg(long, value_name = "N")]
    pub max_iter: Option<usize>,

    /// Initial front: linear, flux, or file
    #[arg(long, value_name = "KIND")]
    pub initial: Option<String>,

    /// Slope of the linear initial front (default 1)
    #[arg(long, value_name = "C")]
    pub slope: Option<f64>,

    /// boundary.csv to start from when --initial file
    #[arg(long, value_name = "PATH")]
    pub initial_file: Option<std::path::PathBuf>,

    /// Output directory for CSV/SVG products (default ".")
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: std::path::PathBuf,

    /// Also emit SVG line charts next to the CSVs
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Also write the full front history to iterates.csv
    #[arg(long)]
    pub dump_iterates: bool,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Number of refinement levels (level k runs at dxi = 0.1 / 2^k)
    #[arg(long, default_value_t = 5)]
    pub levels: u32,

    /// Time at which the error is measured (default 1)
    #[arg(long, default_value_t = 1.0)]
    pub snapshot: f64,
}

#[derive(Debug, Args)]
pub struct OperatorsArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Comma-separated relaxation weights to compare
    #[arg(long, default_value = "1.0,0.5", value_name = "LIST")]
    pub alphas: String,

    /// Iterations to run for each weight (overrides --max-iter)
    #[arg(long, value_name = "N")]
    pub sweep_iters: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RefineArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Step size of the refinement (default 0.05)
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,

    /// Refine the ramp front s = C*t instead of a converged solve
    #[arg(long, value_name = "C")]
    pub candidate_slope: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}
