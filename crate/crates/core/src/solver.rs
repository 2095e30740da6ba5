//! Fixed Boundary problem: given an interface curve `s`, solve the heat
//! problem on the front-fixed strip `xi = x/s(t) in [0,1]` with a
//! Crank-Nicolson step in time.
//!
//! With `z = s^2` the transformed equation `F_xixi = z F_t - (xi/2) z' F_xi`
//! discretizes, per time step `n`, into the tridiagonal system
//!
//! ```text
//! (1 - sigma_i) F_{i-1}^n - (2 + rho) F_i^n + (1 + sigma_i) F_{i+1}^n
//!     = -(1 - sigma_i) F_{i-1}^{n-1} + (2 - rho) F_i^{n-1} - (1 + sigma_i) F_{i+1}^{n-1}
//! ```
//!
//! with `rho = z^{n-1/2} 2 dxi^2/dt` and `sigma_i = (xi_i/4) (dz/dt) dxi`.
//! Row 0 encodes the heating mode (flux via ghost-node elimination, or a
//! direct temperature row), row N pins the front temperature to zero.

use crate::error::{Result, StefanError};
use crate::grid::{BoundaryCurve, Discretization, TemperatureField};
use crate::problem::{BoundaryCondition, ProblemSpec};

/// Per-step scheme coefficients derived from the squared interface `z = s^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCoefficients {
    /// `rho^n = z^{n-1/2} * 2 dxi^2 / dt`, positive for n >= 1.
    pub rho: f64,
    /// `sigma_i^n` for i = 0..N (zero at both ends).
    pub sigma: Vec<f64>,
}

/// Coefficients of the step-`n` system. `z^0 = 0` enters the first step
/// as-is: `z^{1/2} = z^1/2` and `(dz/dt)^1 = z^1/dt` stay well defined
/// whenever `s^1 > 0`.
pub fn step_coefficients(disc: &Discretization, curve: &BoundaryCurve, n: usize) -> StepCoefficients {
    let s_prev = curve.get(n - 1);
    let s_cur = curve.get(n);
    let z_prev = s_prev * s_prev;
    let z_cur = s_cur * s_cur;
    let z_mid = 0.5 * (z_cur + z_prev);
    let dz_dt = (z_cur - z_prev) / disc.dt();
    let dxi = disc.dxi();
    let rho = z_mid * 2.0 * dxi * dxi / disc.dt();
    let sigma = (0..=disc.n()).map(|i| 0.25 * disc.xi(i) * dz_dt * dxi).collect();
    StepCoefficients { rho, sigma }
}

/// One assembled time step in banded form. All four arrays have length
/// N+1; `sub[0]` and `sup[N]` are unused and stay zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Residual `A x - rhs` of a candidate solution, for diagnostics.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i] - self.rhs[i];
                if i > 0 {
                    v += self.sub[i] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.sup[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// Assembles the step-`n` system from the previous field column.
///
/// Requires `1 <= n <= M` and columns `0..n-1` of `field` already filled.
pub fn assemble_step(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
    field: &TemperatureField,
    n: usize,
) -> Result<TridiagonalSystem> {
    if n == 0 || n > disc.m() {
        return Err(StefanError::InvalidParameter(format!(
            "step index {n} outside 1..={}",
            disc.m()
        )));
    }
    if curve.len() != disc.m() + 1 {
        return Err(StefanError::LengthMismatch(format!(
            "curve has {} nodes, grid needs {}",
            curve.len(),
            disc.m() + 1
        )));
    }
    if !(curve.get(n) > 0.0) || (n >= 2 && !(curve.get(n - 1) > 0.0)) {
        return Err(StefanError::InadmissibleCurve(format!(
            "s^{n} must be positive for the front-fixing transform"
        )));
    }

    let size = disc.n() + 1;
    let last = size - 1;
    let dxi = disc.dxi();
    let coeffs = step_coefficients(disc, curve, n);
    let rho = coeffs.rho;

    let mut sub = vec![0.0; size];
    let mut diag = vec![0.0; size];
    let mut sup = vec![0.0; size];
    let mut rhs = vec![0.0; size];

    let prev = field.column(n - 1);

    for i in 1..last {
        let sigma = coeffs.sigma[i];
        sub[i] = 1.0 - sigma;
        diag[i] = -(2.0 + rho);
        sup[i] = 1.0 + sigma;
        rhs[i] = -(1.0 - sigma) * prev[i - 1] + (2.0 - rho) * prev[i] - (1.0 + sigma) * prev[i + 1];
    }

    match &spec.bc {
        BoundaryCondition::Neumann { q } => {
            // Ghost-node elimination of F_{-1} under F_xi(0,t) = -s(t) q(t).
            let q_cur = q.eval(disc.time(n));
            let q_prev = q.eval(disc.time(n - 1));
            diag[0] = -(2.0 + rho);
            sup[0] = 2.0;
            rhs[0] = (2.0 - rho) * prev[0]
                - 2.0 * prev[1]
                - 2.0 * dxi * (q_cur * curve.get(n) + q_prev * curve.get(n - 1));
        }
        BoundaryCondition::Dirichlet { g } => {
            diag[0] = 1.0;
            sup[0] = 0.0;
            rhs[0] = g.eval(disc.time(n));
        }
    }

    // Front row: F_N^n = 0, kept in the scheme's own scaling.
    sub[last] = 0.0;
    diag[last] = -(2.0 + rho);
    rhs[last] = (2.0 - rho) * prev[last];

    Ok(TridiagonalSystem { sub, diag, sup, rhs })
}

/// Relative pivot size below which the elimination reports a breakdown.
const PIVOT_GUARD: f64 = 1e-300;

/// Thomas elimination for a tridiagonal system; O(N), no pivoting.
pub fn thomas_solve(sys: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = sys.size();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut upper = vec![0.0; n];
    let mut x = vec![0.0; n];

    let mut pivot = sys.diag[0];
    if pivot.abs() < PIVOT_GUARD {
        return Err(StefanError::ZeroPivot { row: 0 });
    }
    if n > 1 {
        upper[0] = sys.sup[0] / pivot;
    }
    x[0] = sys.rhs[0] / pivot;

    for i in 1..n {
        pivot = sys.diag[i] - sys.sub[i] * upper[i - 1];
        if pivot.abs() < PIVOT_GUARD {
            return Err(StefanError::ZeroPivot { row: i });
        }
        if i + 1 < n {
            upper[i] = sys.sup[i] / pivot;
        }
        x[i] = (sys.rhs[i] - sys.sub[i] * x[i - 1]) / pivot;
    }

    for i in (0..n - 1).rev() {
        x[i] -= upper[i] * x[i + 1];
    }
    Ok(x)
}

/// Solves the Fixed Boundary problem for the given interface curve,
/// marching the Crank-Nicolson step from the zero initial column.
pub fn solve_fixed_boundary(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
) -> Result<TemperatureField> {
    curve.check_admissible()?;
    let mut field = TemperatureField::zeros(disc);
    for n in 1..=disc.m() {
        let sys = assemble_step(spec, disc, curve, &field, n)?;
        let column = thomas_solve(&sys)
            .map_err(|e| StefanError::StepFailed { step: n, source: Box::new(e) })?;
        field.set_column(n, &column);
    }
    Ok(field)
}
