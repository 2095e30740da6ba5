//! Variational assessment and refinement of a candidate front.
//!
//! `discrepancy` quantifies how badly a front violates the melting-front
//! flux balance, as time-integrated squared defects: `d1` integrates
//! `(U^s_x(s(t),t) + s'(t))^2`, `d2` adds the squared front temperature
//! (identically zero on a solve boundary, where the scheme enforces it).
//!
//! `refine_boundary` improves the front to first order: perturbing
//! `s -> s + eps*eta` and expanding the field about the front turns the
//! discrepancy into a quadratic functional of `eta`, whose minimizer makes
//! the linearized integrand vanish:
//!
//! ```text
//! eta'(t) + b(t) eta(t) + a(t) = 0,   eta(0) = 0,
//! a = s' + U^s_x(s,t),   b = U^s_xx(s,t),
//! ```
//!
//! integrated here with the trapezoidal rule (second order). Along this path
//! the projected `d2` of `s + eps*eta` contracts by `1 - 2 eps` up to
//! `O(eps^2)`. The curvature coefficient comes from the front identity
//! `U_xx(s,t) = -U_x(s,t) s'(t)` (differentiate the vanishing front
//! temperature and use the heat equation) rather than second differences,
//! which would amplify noise near the front.

use crate::error::{Result, StefanError};
use crate::grid::{
    boundary_rate, one_sided_deriv, trapezoid, BoundaryCurve, Discretization, Edge,
    TemperatureField, CURVE_FLOOR, DEGENERACY_GUARD,
};
use crate::problem::{eval_beta, ProblemSpec};
use crate::solver::solve_fixed_boundary;

/// Time-integrated flux-balance defects of a candidate front.
#[derive(Debug, Clone)]
pub struct DiscrepancyReport {
    /// Integral of the squared gradient defect `(U_x(s,t) + s')^2`.
    pub d1: f64,
    /// Same plus the squared front temperature.
    pub d2: f64,
    /// Per-node residual `beta(s^n) s'^n + U_x(s^n, t^n)`; node 0 is zero.
    pub residual_curve: Vec<f64>,
}

impl DiscrepancyReport {
    pub fn max_residual(&self) -> f64 {
        self.residual_curve.iter().fold(0.0f64, |acc, r| acc.max(r.abs()))
    }
}

/// Field, front gradient and front rate shared by the operations below.
struct FrontData {
    field: TemperatureField,
    /// `U_x(s^n, t^n) = F_xi(1, t^n)/s^n`; node 0 left at zero.
    front_gradient: Vec<f64>,
    /// `s'^n` by the second-order stencils.
    rate: Vec<f64>,
}

fn front_data(spec: &ProblemSpec, disc: &Discretization, curve: &BoundaryCurve) -> Result<FrontData> {
    let field = solve_fixed_boundary(spec, disc, curve)?;
    let mut front_gradient = vec![0.0; disc.m() + 1];
    for n in 1..=disc.m() {
        let s = curve.get(n);
        if s < DEGENERACY_GUARD {
            return Err(StefanError::InadmissibleCurve(format!(
                "s^{n} = {s} too small to divide by in the chain rule"
            )));
        }
        front_gradient[n] = one_sided_deriv(&field, n, Edge::Right, disc.dxi())? / s;
    }
    let rate = (0..=disc.m())
        .map(|n| boundary_rate(curve, n, disc.dt()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(FrontData { field, front_gradient, rate })
}

/// Measures the flux-balance defect of `curve`. The degenerate t = 0
/// integrand is taken as zero.
pub fn discrepancy(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
) -> Result<DiscrepancyReport> {
    let data = front_data(spec, disc, curve)?;
    let m = disc.m();
    let front_row = disc.n();

    let mut d1_integrand = vec![0.0; m + 1];
    let mut d2_integrand = vec![0.0; m + 1];
    let mut residual_curve = vec![0.0; m + 1];
    for n in 1..=m {
        let defect = data.front_gradient[n] + data.rate[n];
        d1_integrand[n] = defect * defect;
        let front_temp = data.field.get(front_row, n);
        d2_integrand[n] = defect * defect + front_temp * front_temp;
        residual_curve[n] =
            eval_beta(spec, curve.get(n))? * data.rate[n] + data.front_gradient[n];
    }
    Ok(DiscrepancyReport {
        d1: trapezoid(&d1_integrand, disc.dt()),
        d2: trapezoid(&d2_integrand, disc.dt()),
        residual_curve,
    })
}

/// Coefficients of the linearized improvement equation on the time grid.
/// These are front-local quantities of the solve; the `a`/`b` names keep
/// them apart from the latent-heat coefficient and the relaxation weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationCoefficients {
    /// Drift `a^n = s'^n + U_x(s^n, t^n)`.
    pub a: Vec<f64>,
    /// Curvature `b^n = U_xx(s^n, t^n) = -U_x(s^n, t^n) s'^n`.
    pub b: Vec<f64>,
}

/// Front gradient with the degenerate first node filled by linear
/// extrapolation from the two following nodes.
fn extrapolated_gradient(data: &FrontData, m: usize) -> Vec<f64> {
    let mut g = data.front_gradient.clone();
    if m >= 2 {
        g[0] = 2.0 * g[1] - g[2];
    } else {
        g[0] = g[1];
    }
    g
}

/// Computes the drift and curvature of the linearized improvement equation.
pub fn perturbation_coefficients(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
) -> Result<PerturbationCoefficients> {
    let data = front_data(spec, disc, curve)?;
    let gradient = extrapolated_gradient(&data, disc.m());
    let a = (0..=disc.m()).map(|n| data.rate[n] + gradient[n]).collect();
    let b = (0..=disc.m()).map(|n| -gradient[n] * data.rate[n]).collect();
    Ok(PerturbationCoefficients { a, b })
}

/// Integrates the linearized optimality path `eta' + b eta + a = 0`,
/// `eta(0) = 0`, with the trapezoidal rule.
pub fn solve_perturbation(
    coeffs: &PerturbationCoefficients,
    disc: &Discretization,
) -> Result<Vec<f64>> {
    let m = disc.m();
    if coeffs.a.len() != m + 1 || coeffs.b.len() != m + 1 {
        return Err(StefanError::LengthMismatch(format!(
            "coefficients have {} / {} nodes, grid needs {}",
            coeffs.a.len(),
            coeffs.b.len(),
            m + 1
        )));
    }
    if coeffs.a.iter().chain(&coeffs.b).any(|v| !v.is_finite()) {
        return Err(StefanError::InvalidParameter("non-finite perturbation coefficient".into()));
    }
    let dt = disc.dt();
    let mut eta = vec![0.0; m + 1];
    for n in 1..=m {
        let denom = 1.0 + 0.5 * dt * coeffs.b[n];
        if denom.abs() < 1e-12 {
            return Err(StefanError::InvalidParameter(format!(
                "perturbation step singular at node {n} (b = {}); refine the time grid",
                coeffs.b[n]
            )));
        }
        let numer = eta[n - 1] * (1.0 - 0.5 * dt * coeffs.b[n - 1])
            - 0.5 * dt * (coeffs.a[n] + coeffs.a[n - 1]);
        eta[n] = numer / denom;
    }
    Ok(eta)
}

/// Result of one linearized refinement step.
#[derive(Debug, Clone)]
pub struct RefinementOutcome {
    /// `s + eps*eta`, floored to admissibility.
    pub refined: BoundaryCurve,
    /// Discrepancy of the input front.
    pub before: DiscrepancyReport,
    /// `d2` of the refined front evaluated through the first-order
    /// expansion of the field about the input front (no re-solve).
    pub projected_d2: f64,
    /// `projected_d2 / before.d2`; approaches `1 - 2 eps` for small steps.
    pub projected_ratio: f64,
    /// The perturbation direction `eta`.
    pub eta: Vec<f64>,
}

/// One linearized improvement `s -> s + eps*eta`.
///
/// The projected discrepancy evaluates the `d2` integrand on the perturbed
/// front with the field quantities expanded to first order about `s`
/// (`U_x(s + eps*eta) ~ U_x + U_xx eps*eta`, `U(s + eps*eta) ~ U_x eps*eta`);
/// the degenerate t = 0 integrand is dropped exactly as in `discrepancy`.
pub fn refine_boundary(
    spec: &ProblemSpec,
    disc: &Discretization,
    curve: &BoundaryCurve,
    epsilon: f64,
) -> Result<RefinementOutcome> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(StefanError::InvalidParameter(format!(
            "refinement step must lie in [0,1], got {epsilon}"
        )));
    }
    let data = front_data(spec, disc, curve)?;
    let gradient = extrapolated_gradient(&data, disc.m());
    let coeffs = PerturbationCoefficients {
        a: (0..=disc.m()).map(|n| data.rate[n] + gradient[n]).collect(),
        b: (0..=disc.m()).map(|n| -gradient[n] * data.rate[n]).collect(),
    };
    let eta = solve_perturbation(&coeffs, disc)?;

    let m = disc.m();
    let dt = disc.dt();
    let front_row = disc.n();

    // d2 of the input front (t = 0 integrand zeroed)
    let mut before_d1 = vec![0.0; m + 1];
    let mut before_d2 = vec![0.0; m + 1];
    let mut residual_curve = vec![0.0; m + 1];
    for n in 1..=m {
        let defect = data.front_gradient[n] + data.rate[n];
        let front_temp = data.field.get(front_row, n);
        before_d1[n] = defect * defect;
        before_d2[n] = defect * defect + front_temp * front_temp;
        residual_curve[n] =
            eval_beta(spec, curve.get(n))? * data.rate[n] + data.front_gradient[n];
    }
    let before = DiscrepancyReport {
        d1: trapezoid(&before_d1, dt),
        d2: trapezoid(&before_d2, dt),
        residual_curve,
    };

    // eta'(t) by the same second-order stencils as the front rate
    let eta_curve = BoundaryCurve::from_values_unchecked(eta.clone());
    let mut projected = vec![0.0; m + 1];
    for n in 1..=m {
        let eta_rate = boundary_rate(&eta_curve, n, dt)?;
        let gradient_defect = coeffs.a[n] + epsilon * (eta_rate + coeffs.b[n] * eta[n]);
        let front_temp = epsilon * gradient[n] * eta[n];
        projected[n] = gradient_defect * gradient_defect + front_temp * front_temp;
    }
    let projected_d2 = trapezoid(&projected, dt);
    let projected_ratio = if before.d2 > 0.0 { projected_d2 / before.d2 } else { 1.0 };

    let mut values: Vec<f64> = (0..=m).map(|n| curve.get(n) + epsilon * eta[n]).collect();
    values[0] = 0.0;
    let mut floored = 0;
    for v in values.iter_mut().skip(1) {
        if *v < CURVE_FLOOR {
            *v = CURVE_FLOOR;
            floored += 1;
        }
    }
    if m > 0 && floored == m {
        return Err(StefanError::InadmissibleCurve(
            "refinement step collapsed the entire front to the floor".into(),
        ));
    }

    Ok(RefinementOutcome {
        refined: BoundaryCurve::from_values_unchecked(values),
        before,
        projected_d2,
        projected_ratio,
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{builtin_example, Beta, BoundaryCondition, ExampleId, ProblemSpec, TimeFn};

    fn disc(n: usize) -> Discretization {
        Discretization::new(n, n, 1.0).unwrap()
    }

    #[test]
    fn exact_front_has_small_gradient_defect() {
        let d = disc(40);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = BoundaryCurve::sample(&d, |t| t);
        let report = discrepancy(&spec, &d, &curve).unwrap();
        assert!(report.d1 <= 1e-3, "d1 = {}", report.d1);
    }

    #[test]
    fn d2_equals_d1_on_a_solve_boundary() {
        // The front temperature column is the enforced zero, so the extra
        // d2 term vanishes identically.
        let d = disc(20);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        for slope in [0.7, 1.0, 1.6] {
            let curve = BoundaryCurve::sample(&d, |t| slope * t);
            let report = discrepancy(&spec, &d, &curve).unwrap();
            assert!(
                (report.d2 - report.d1).abs() <= 1e-12 * (1.0 + report.d1),
                "slope {slope}: d1 = {}, d2 = {}",
                report.d1,
                report.d2
            );
        }
    }

    #[test]
    fn wrong_front_has_much_larger_defect() {
        let d = disc(40);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let exact = discrepancy(&spec, &d, &BoundaryCurve::sample(&d, |t| t)).unwrap();
        let wrong = discrepancy(&spec, &d, &BoundaryCurve::sample(&d, |t| 2.0 * t)).unwrap();
        assert!(
            wrong.d1 >= 10.0 * exact.d1,
            "wrong front d1 = {} vs exact d1 = {}",
            wrong.d1,
            exact.d1
        );
    }

    #[test]
    fn exact_front_coefficients_match_closed_forms() {
        // On the exact pair: a = s' + U_x(s,t) ~ 0 and
        // b = -U_x * s' = e^0 * 1 = 1.
        let d = disc(40);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = BoundaryCurve::sample(&d, |t| t);
        let coeffs = perturbation_coefficients(&spec, &d, &curve).unwrap();
        for n in 0..=d.m() {
            assert!(coeffs.a[n].abs() <= 2e-2, "a[{n}] = {}", coeffs.a[n]);
            assert!((coeffs.b[n] - 1.0).abs() <= 5e-2, "b[{n}] = {}", coeffs.b[n]);
        }
    }

    #[test]
    fn zero_field_coefficients_reduce_to_the_rate() {
        let d = disc(10);
        let spec = ProblemSpec::new(
            BoundaryCondition::Neumann { q: TimeFn::new(|_| 0.0) },
            Beta::Constant(1.0),
            1.0,
        )
        .unwrap();
        let curve = BoundaryCurve::sample(&d, |t| t);
        let coeffs = perturbation_coefficients(&spec, &d, &curve).unwrap();
        for n in 0..=d.m() {
            assert!((coeffs.a[n] - 1.0).abs() < 1e-12, "a[{n}] = {}", coeffs.a[n]);
            assert_eq!(coeffs.b[n], 0.0, "b[{n}]");
        }
    }

    #[test]
    fn homogeneous_drift_gives_zero_perturbation() {
        let d = disc(16);
        let coeffs = PerturbationCoefficients {
            a: vec![0.0; 17],
            b: (0..17).map(|n| 0.5 + 0.1 * n as f64).collect(),
        };
        let eta = solve_perturbation(&coeffs, &d).unwrap();
        assert!(eta.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_coefficients_match_the_closed_form() {
        // eta' = -(1 + eta), eta(0) = 0  =>  eta(t) = e^{-t} - 1
        let error = |steps: usize| -> f64 {
            let d = Discretization::new(2, steps, 1.0).unwrap();
            let coeffs = PerturbationCoefficients {
                a: vec![1.0; steps + 1],
                b: vec![1.0; steps + 1],
            };
            let eta = solve_perturbation(&coeffs, &d).unwrap();
            (0..=steps)
                .map(|n| {
                    let t = d.time(n);
                    (eta[n] - ((-t).exp() - 1.0)).abs()
                })
                .fold(0.0, f64::max)
        };
        let coarse = error(20);
        assert!(coarse < 1e-3, "coarse error {coarse}");
        let ratio = coarse / error(40);
        assert!((3.5..=4.5).contains(&ratio), "refinement ratio {ratio}");
    }

    #[test]
    fn perturbation_is_linear_in_the_drift() {
        let d = disc(20);
        let b: Vec<f64> = (0..=20).map(|n| 0.3 + 0.05 * n as f64).collect();
        let a: Vec<f64> = (0..=20).map(|n| 1.0 + (n as f64 / 20.0).sin()).collect();
        let doubled: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let eta = solve_perturbation(&PerturbationCoefficients { a, b: b.clone() }, &d).unwrap();
        let eta2 = solve_perturbation(&PerturbationCoefficients { a: doubled, b }, &d).unwrap();
        for n in 0..=20 {
            assert!(
                (eta2[n] - 2.0 * eta[n]).abs() <= 1e-10 * (1.0 + eta[n].abs()),
                "node {n}: {} vs {}",
                eta2[n],
                2.0 * eta[n]
            );
        }
    }

    #[test]
    fn singular_step_is_reported() {
        let d = disc(10);
        let b = -2.0 / d.dt(); // 1 + dt*b/2 = 0
        let coeffs = PerturbationCoefficients { a: vec![1.0; 11], b: vec![b; 11] };
        assert!(solve_perturbation(&coeffs, &d).is_err());
    }

    #[test]
    fn zero_step_keeps_the_front() {
        let d = disc(20);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = BoundaryCurve::sample(&d, |t| 1.2 * t);
        let out = refine_boundary(&spec, &d, &curve, 0.0).unwrap();
        assert_eq!(out.refined.values(), curve.values());
        assert!((out.projected_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projected_contraction_tracks_the_step_size() {
        let d = disc(40);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = BoundaryCurve::sample(&d, |t| 1.2 * t);
        let out = refine_boundary(&spec, &d, &curve, 0.05).unwrap();
        assert!(
            (0.88..=0.93).contains(&out.projected_ratio),
            "projected ratio {} (target 0.90)",
            out.projected_ratio
        );
    }

    #[test]
    fn projected_contraction_is_first_order_sharp() {
        // |ratio - (1 - 2 eps)| <= C eps^2 with one C across the step sizes
        let d = disc(40);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = BoundaryCurve::sample(&d, |t| 1.2 * t);
        let mut worst_c = 0.0f64;
        for eps in [0.025, 0.05, 0.1] {
            let out = refine_boundary(&spec, &d, &curve, eps).unwrap();
            let c = (out.projected_ratio - (1.0 - 2.0 * eps)).abs() / (eps * eps);
            worst_c = worst_c.max(c);
        }
        assert!(worst_c <= 5.0, "fitted second-order constant {worst_c}");
    }

    #[test]
    fn resolved_defect_actually_decreases() {
        let d = disc(40);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = BoundaryCurve::sample(&d, |t| 1.2 * t);
        let out = refine_boundary(&spec, &d, &curve, 0.05).unwrap();
        let after = discrepancy(&spec, &d, &out.refined).unwrap();
        assert!(
            after.d1 < out.before.d1,
            "re-solved d1 {} did not drop below {}",
            after.d1,
            out.before.d1
        );
    }

    #[test]
    fn refining_the_exact_front_is_a_near_noop() {
        let d = disc(40);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = BoundaryCurve::sample(&d, |t| t);
        let eps = 0.05;
        let out = refine_boundary(&spec, &d, &curve, eps).unwrap();
        // scale: the fixed-point defect of the sampled exact front
        let defect = crate::operators::apply_r(&spec, &d, &curve).unwrap().sup_distance(&curve);
        let max_move = out
            .eta
            .iter()
            .map(|e| (eps * e).abs())
            .fold(0.0, f64::max);
        assert!(
            max_move <= 10.0 * defect,
            "refinement moved the exact front by {max_move} (defect {defect})"
        );
    }

    #[test]
    fn degenerate_front_is_rejected() {
        let d = disc(10);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let mut values = vec![1e-15; 11];
        values[0] = 0.0;
        let degenerate = BoundaryCurve::from_values_unchecked(values);
        assert!(discrepancy(&spec, &d, &degenerate).is_err());
    }
}
