//! Boundary-update transforms. Each maps a candidate front `s` to the time
//! integral of the melting-front flux balance evaluated on the fixed-boundary
//! solution `U^s`; fixed points solve the free-boundary problem.
//!
//! Three forms are provided:
//!
//! * `apply_r_neumann` - divergence form for flux heating, constant beta:
//!   `R(s)(t) = int_0^t q dz - int_0^{s(t)} U^s dx`;
//! * `apply_r_dirichlet` - divergence form for temperature heating,
//!   constant beta: `R(s)(t) = -int_0^t U^s_x(0,z) dz - int_0^{s(t)} U^s dx`;
//! * `apply_r_direct` - direct flux-balance form for arbitrary positive
//!   beta: `R(s)(t) = int_0^t [-U^s_x(s(z),z) / beta(s(z))] dz`.
//!
//! The divergence forms trade the front gradient for integrals of the field
//! and of the boundary data, which the scheme resolves more accurately.
//!
//! `R` inverts pointwise ordering of candidate fronts (if `s1 <= s2`
//! everywhere then `R(s1) >= R(s2)` everywhere), so iterating it oscillates
//! around the fixed point; the relaxed update `P^alpha = alpha R + (1-alpha) id`
//! damps the oscillation. Outputs are *not* clamped to positivity here; the
//! outer iteration enforces admissibility before the next solve.

use crate::error::{Result, StefanError};
use crate::grid::{
    one_sided_deriv, trapezoid, trapezoid_prefix, BoundaryCurve, Discretization, Edge,
    TemperatureField, DEGENERACY_GUARD,
};
use crate::problem::{eval_beta, BoundaryCondition, ProblemSpec};
use crate::solver::solve_fixed_boundary;

/// Relaxation weight of the damped update, with an optional Lipschitz
/// estimate that pins the weight at its minimizing value `1/(1+gamma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig {
    alpha: f64,
}

impl OperatorConfig {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(StefanError::InvalidParameter(format!(
                "relaxation weight must lie in [0,1], got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    /// Weight `alpha = 1/(1 + gamma)` from a bound `gamma` on the update's
    /// Lipschitz constant.
    pub fn from_gamma_estimate(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(StefanError::InvalidParameter(format!(
                "Lipschitz estimate must be positive, got {gamma}"
            )));
        }
        Ok(Self { alpha: 1.0 / (1.0 + gamma) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for OperatorConfig {
    /// The plain average of update and identity.
    fn default() -> Self {
        Self { alpha: 0.5 }
    }
}

fn require_constant_beta(spec: &ProblemSpec, form: &str) -> Result<f64> {
    spec.beta.as_constant().ok_or_else(|| {
        StefanError::InvalidParameter(format!(
            "the {form} divergence form requires constant beta; use the direct form instead"
        ))
    })
}

/// Integral of the field over the liquid region at step `n`:
/// `int_0^{s^n} U dx = s^n * int_0^1 F(xi, t^n) dxi`.
fn liquid_heat_content(field: &TemperatureField, curve: &BoundaryCurve, disc: &Discretization, n: usize) -> f64 {
    curve.get(n) * trapezoid(field.column(n), disc.dxi())
}

/// Divergence-form update for flux heating (constant beta).
pub fn apply_r_neumann(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
) -> Result<BoundaryCurve> {
    let beta = require_constant_beta(spec, "Neumann")?;
    let q = match &spec.bc {
        BoundaryCondition::Neumann { q } => q,
        BoundaryCondition::Dirichlet { .. } => {
            return Err(StefanError::InvalidParameter(
                "Neumann update applied to a Dirichlet problem".into(),
            ))
        }
    };
    let field = solve_fixed_boundary(spec, disc, curve)?;
    let flux_samples: Vec<f64> = (0..=disc.m()).map(|n| q.eval(disc.time(n))).collect();
    let flux_integral = trapezoid_prefix(&flux_samples, disc.dt());
    let out = (0..=disc.m())
        .map(|n| (flux_integral[n] - liquid_heat_content(&field, curve, disc, n)) / beta)
        .collect();
    Ok(BoundaryCurve::from_values_unchecked(out))
}

/// Extends an integrand series to the degenerate t = 0 node by linear
/// extrapolation from the two following nodes. The front starts with zero
/// width, so gradient quantities at t = 0 exist only as one-sided limits;
/// extrapolation recovers them at second order, which plain zeroing does
/// not (it costs O(dt) in the running integral).
fn extrapolate_corner(samples: &mut [f64]) {
    if samples.len() >= 3 {
        samples[0] = 2.0 * samples[1] - samples[2];
    } else if samples.len() == 2 {
        samples[0] = samples[1];
    }
}

/// Divergence-form update for temperature heating (constant beta). The
/// origin gradient comes from the one-sided edge stencil via the chain rule
/// `U_x(0,t) = F_xi(0,t)/s(t)`; its t = 0 corner value is extrapolated.
pub fn apply_r_dirichlet(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
) -> Result<BoundaryCurve> {
    let beta = require_constant_beta(spec, "Dirichlet")?;
    if !spec.bc.is_dirichlet() {
        return Err(StefanError::InvalidParameter(
            "Dirichlet update applied to a Neumann problem".into(),
        ));
    }
    let field = solve_fixed_boundary(spec, disc, curve)?;
    let mut origin_gradient = Vec::with_capacity(disc.m() + 1);
    origin_gradient.push(0.0);
    for n in 1..=disc.m() {
        let s = curve.get(n);
        if s < DEGENERACY_GUARD {
            return Err(StefanError::InadmissibleCurve(format!(
                "s^{n} = {s} too small to divide by in the chain rule"
            )));
        }
        origin_gradient.push(one_sided_deriv(&field, n, Edge::Left, disc.dxi())? / s);
    }
    extrapolate_corner(&mut origin_gradient);
    let gradient_integral = trapezoid_prefix(&origin_gradient, disc.dt());
    let out = (0..=disc.m())
        .map(|n| (-gradient_integral[n] - liquid_heat_content(&field, curve, disc, n)) / beta)
        .collect();
    Ok(BoundaryCurve::from_values_unchecked(out))
}

/// Direct flux-balance update, valid for arbitrary positive beta. The
/// front gradient comes from the right edge stencil, `U_x(s,t) = F_xi(1,t)/s`;
/// its t = 0 corner value is extrapolated.
pub fn apply_r_direct(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
) -> Result<BoundaryCurve> {
    let field = solve_fixed_boundary(spec, disc, curve)?;
    let mut integrand = Vec::with_capacity(disc.m() + 1);
    integrand.push(0.0);
    for n in 1..=disc.m() {
        let s = curve.get(n);
        if s < DEGENERACY_GUARD {
            return Err(StefanError::InadmissibleCurve(format!(
                "s^{n} = {s} too small to divide by in the chain rule"
            )));
        }
        let front_gradient = one_sided_deriv(&field, n, Edge::Right, disc.dxi())? / s;
        integrand.push(-front_gradient / eval_beta(spec, s)?);
    }
    extrapolate_corner(&mut integrand);
    Ok(BoundaryCurve::from_values_unchecked(trapezoid_prefix(&integrand, disc.dt())))
}

/// Applies the preferred form of the update for this problem: divergence
/// form whenever beta is constant, direct form otherwise.
pub fn apply_r(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
) -> Result<BoundaryCurve> {
    if spec.beta.as_constant().is_some() {
        match &spec.bc {
            BoundaryCondition::Neumann { .. } => apply_r_neumann(spec, disc, curve),
            BoundaryCondition::Dirichlet { .. } => apply_r_dirichlet(spec, disc, curve),
        }
    } else {
        apply_r_direct(spec, disc, curve)
    }
}

/// Relaxed update `P^alpha(s) = alpha R(s) + (1 - alpha) s`, applied
/// pointwise to a precomputed transform.
pub fn apply_p(
    config: &OperatorConfig,
    r_of_s: &BoundaryCurve,
    s: &BoundaryCurve,
) -> Result<BoundaryCurve> {
    if r_of_s.len() != s.len() {
        return Err(StefanError::LengthMismatch(format!(
            "transform has {} nodes, curve has {}",
            r_of_s.len(),
            s.len()
        )));
    }
    let alpha = config.alpha;
    let values = r_of_s
        .values()
        .iter()
        .zip(s.values())
        .map(|(r, s)| alpha * r + (1.0 - alpha) * s)
        .collect();
    Ok(BoundaryCurve::from_values_unchecked(values))
}
