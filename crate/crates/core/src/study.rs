//! Reproduction machinery: the weighted l2 error of a transformed field
//! against an exact solution, the observed order of accuracy under grid
//! halving, refinement studies over a ladder of grids, and the
//! flux-balance residual report used when no exact solution exists.

use crate::driver::{run_iteration, IterationConfig};
use crate::error::{Result, StefanError};
use crate::grid::{BoundaryCurve, Discretization, TemperatureField};
use crate::problem::{ExactSolution, ProblemSpec};
use crate::variational::{discrepancy, DiscrepancyReport};

/// Base spatial step of the refinement ladder; level `k` uses `0.1 * 2^-k`.
pub const BASE_DXI: f64 = 0.1;

/// A ladder of refinement levels with the snapshot time for error
/// evaluation. Level `k` runs at `dxi = 0.1 * 2^-k` with `dt = dxi`.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub levels: Vec<u32>,
    pub snapshot_time: f64,
}

impl StudyConfig {
    pub fn new(levels: Vec<u32>, snapshot_time: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(StefanError::InvalidParameter("refinement ladder is empty".into()));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StefanError::InvalidParameter(
                "refinement levels must be strictly increasing".into(),
            ));
        }
        if !(snapshot_time.is_finite() && snapshot_time > 0.0) {
            return Err(StefanError::InvalidParameter(format!(
                "snapshot time must be positive, got {snapshot_time}"
            )));
        }
        Ok(Self { levels, snapshot_time })
    }

    /// The first `count` levels `0..count`, snapshot at t = 1.
    pub fn first_levels(count: u32) -> Result<Self> {
        if count == 0 {
            return Err(StefanError::InvalidParameter("need at least one level".into()));
        }
        Self::new((0..count).collect(), 1.0)
    }

    pub fn dxi(level: u32) -> f64 {
        BASE_DXI * 0.5f64.powi(level as i32)
    }
}

/// One line of a refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub dxi: f64,
    pub error: f64,
    /// Observed order against the previous level; absent on the first row.
    pub order: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Weighted l2 error of the transformed field at time node `n`:
/// `sqrt( dxi * sum_i (F(xi_i, t^n) - T(s^n xi_i, t^n))^2 )`,
/// comparing against the exact temperature at the physical points.
pub fn error_ekn(
    field: &TemperatureField,
    curve: &BoundaryCurve,
    exact: &ExactSolution,
    n: usize,
    disc: &Discretization,
) -> Result<f64> {
    if n > disc.m() {
        return Err(StefanError::InvalidParameter(format!(
            "time node {n} outside 0..={}",
            disc.m()
        )));
    }
    let t = disc.time(n);
    let s = curve.get(n);
    let sum: f64 = (0..=disc.n())
        .map(|i| {
            let diff = field.get(i, n) - exact.temperature(s * disc.xi(i), t);
            diff * diff
        })
        .sum();
    Ok((disc.dxi() * sum).sqrt())
}

/// Observed order of accuracy between two grid-halved error levels:
/// `log2(e_coarse / e_fine)`.
pub fn order_p(e_coarse: f64, e_fine: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) {
        return Err(StefanError::InvalidParameter(format!(
            "order needs positive errors, got {e_coarse} and {e_fine}"
        )));
    }
    Ok((e_coarse / e_fine).log2())
}

/// Runs the full fixed-point solve on every level of the ladder and chains
/// observed orders between consecutive levels. A level that fails to
/// converge is marked and the study continues.
pub fn refinement_study(
    spec: &ProblemSpec,
    exact: &ExactSolution,
    study: &StudyConfig,
    iter_cfg: &IterationConfig,
) -> Result<Vec<StudyRow>> {
    if study.snapshot_time > spec.horizon + 1e-12 {
        return Err(StefanError::InvalidParameter(format!(
            "snapshot time {} beyond horizon {}",
            study.snapshot_time, spec.horizon
        )));
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(study.levels.len());
    for &level in &study.levels {
        let dxi = StudyConfig::dxi(level);
        let disc = Discretization::from_steps(dxi, None, spec.horizon)?;
        let report = run_iteration(spec, &disc, iter_cfg, None)?;
        let curve = report.final_curve();
        let field = crate::solver::solve_fixed_boundary(spec, &disc, curve)?;
        let n = disc.time_index(study.snapshot_time);
        let error = error_ekn(&field, curve, exact, n, &disc)?;
        let order = match rows.last() {
            Some(prev) if prev.error > 0.0 && error > 0.0 => {
                // ladder levels are strictly increasing but not necessarily
                // adjacent; normalize by the actual step ratio
                let step_ratio = prev.dxi / dxi;
                Some((prev.error / error).ln() / step_ratio.ln())
            }
            _ => None,
        };
        rows.push(StudyRow {
            dxi,
            error,
            order,
            converged: report.converged,
            iterations: report.iterations(),
        });
    }
    Ok(rows)
}

/// Flux-balance residual report of a converged front; the acceptance
/// evidence for problems without an exact solution.
pub fn stefan_residual_report(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
) -> Result<DiscrepancyReport> {
    discrepancy(spec, disc, curve)
}
