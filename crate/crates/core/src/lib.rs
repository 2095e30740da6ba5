//! One-dimensional melting front (Stefan) solver.
//!
//! The crate solves the one-phase melting problem on a half line heated at
//! the origin: find the temperature `U(x,t)` and the liquid-solid interface
//! `s(t)` such that `U` satisfies the heat equation on `0 < x < s(t)`,
//! vanishes on the front, and the front moves by the latent-heat balance
//! `beta(s) ds/dt = -U_x(s(t), t)`.
//!
//! The building blocks, bottom to top:
//!
//! * [`grid`] - uniform grids, curve/field containers, stencils, quadrature;
//! * [`problem`] - problem instances and the built-in benchmarks;
//! * [`solver`] - Crank-Nicolson solve of the heat problem on a *given*
//!   front (the front-fixing transform `xi = x/s(t)`);
//! * [`operators`] - the boundary-update transform `R` (fixed points of
//!   which solve the melting problem) and its relaxation `P^alpha`;
//! * [`driver`] - the outer fixed-point iteration with diagnostics;
//! * [`variational`] - discrepancy measures of a candidate front and the
//!   linearized variational improvement step;
//! * [`study`] - error metrics, order-of-accuracy machinery and refinement
//!   studies;
//! * [`csv_io`] - the CSV surfaces used by the command-line tool.

pub mod csv_io;
pub mod driver;
pub mod error;
pub mod expr;
pub mod grid;
pub mod operators;
pub mod problem;
pub mod solver;
pub mod study;
pub mod variational;

pub use driver::{initial_curve, run_iteration, InitialGuess, IterationConfig, IterationReport};
pub use error::{Result, StefanError};
pub use expr::Expr;
pub use grid::{
    boundary_rate, one_sided_deriv, trapezoid, trapezoid_prefix, BoundaryCurve, Discretization,
    Edge, TemperatureField,
};
pub use operators::{apply_p, apply_r, apply_r_direct, apply_r_dirichlet, apply_r_neumann, OperatorConfig};
pub use problem::{
    builtin_example, eval_beta, Beta, BoundaryCondition, ExactSolution, ExampleId,
    OscillationParams, ProblemSpec, TimeFn,
};
pub use solver::{assemble_step, solve_fixed_boundary, thomas_solve, StepCoefficients, TridiagonalSystem};
pub use study::{error_ekn, order_p, refinement_study, stefan_residual_report, StudyConfig, StudyRow};
pub use variational::{
    discrepancy, perturbation_coefficients, refine_boundary, solve_perturbation, DiscrepancyReport,
    PerturbationCoefficients, RefinementOutcome,
};
