//! Outer fixed-point iteration: repeatedly solve the fixed-boundary problem,
//! map the front through the update transform, relax, and monitor the
//! sup-norm change until it drops below tolerance.
//!
//! The driver also records the diagnostics the experiments need: the full
//! iterate history, per-iteration deltas, how often admissibility clamping
//! fired, and (when a reference front is supplied) the sign of the deviation
//! at the worst node - the signature of the oscillation around the fixed
//! point that the relaxed update damps.

use crate::error::{Result, StefanError};
use crate::grid::{trapezoid_prefix, BoundaryCurve, Discretization, CURVE_FLOOR};
use crate::operators::{apply_p, apply_r, OperatorConfig};
use crate::problem::{eval_beta, BoundaryCondition, ProblemSpec};
use crate::variational::discrepancy;

/// Starting front for the iteration.
#[derive(Debug, Clone)]
pub enum InitialGuess {
    /// `s^n = c * t^n` with `c > 0`.
    LinearSlope { c: f64 },
    /// Running integral of `q(t)/beta(0)` - the zero-width-domain limit of
    /// the flux balance. Neumann problems only.
    FluxIntegral,
    /// A caller-supplied admissible curve.
    UserCurve(BoundaryCurve),
}

/// Configuration of one fixed-point run.
#[derive(Debug, Clone)]
pub struct IterationConfig {
    /// Stop when the sup-norm change of an iteration falls below this.
    pub tol: f64,
    /// Hard cap on iterations.
    pub max_iter: usize,
    /// Relaxation weight of the update.
    pub operator: OperatorConfig,
    /// Starting front.
    pub initial: InitialGuess,
    /// Optional alternative stop: halt once the max-node melting-front
    /// residual drops below this. Useful when no exact solution exists.
    pub residual_stop: Option<f64>,
}

impl IterationConfig {
    pub fn new(tol: f64, max_iter: usize, operator: OperatorConfig, initial: InitialGuess) -> Result<Self> {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(StefanError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        if max_iter == 0 {
            return Err(StefanError::InvalidParameter("need at least one iteration".into()));
        }
        Ok(Self { tol, max_iter, operator, initial, residual_stop: None })
    }
}

/// Everything a fixed-point run produced.
#[derive(Debug, Clone)]
pub struct IterationReport {
    /// Front history: the initial curve followed by one entry per iteration.
    pub iterates: Vec<BoundaryCurve>,
    /// Sup-norm change per iteration; `deltas.len()` iterations ran.
    pub deltas: Vec<f64>,
    /// Whether the last delta fell below tolerance (or the residual stop fired).
    pub converged: bool,
    /// Total number of node values lifted to the admissibility floor.
    pub clamp_events: usize,
    /// The same, broken down by iteration.
    pub clamps_per_iteration: Vec<usize>,
    /// Per-iteration sign of (iterate - reference) at the node of largest
    /// deviation; empty when no reference was supplied. +1, -1, or 0.
    pub sign_pattern: Vec<i8>,
}

impl IterationReport {
    pub fn final_curve(&self) -> &BoundaryCurve {
        self.iterates.last().expect("report always holds the initial curve")
    }

    pub fn iterations(&self) -> usize {
        self.deltas.len()
    }
}

/// Materializes the starting front on the grid.
pub fn initial_curve(
    spec: &ProblemSpec,
    disc: &Discretization,
    guess: &InitialGuess,
) -> Result<BoundaryCurve> {
    match guess {
        InitialGuess::LinearSlope { c } => {
            if !(c.is_finite() && *c > 0.0) {
                return Err(StefanError::InvalidParameter(format!(
                    "initial slope must be positive, got {c}"
                )));
            }
            BoundaryCurve::new((0..=disc.m()).map(|n| c * disc.time(n)).collect())
        }
        InitialGuess::FluxIntegral => {
            let q = match &spec.bc {
                BoundaryCondition::Neumann { q } => q,
                BoundaryCondition::Dirichlet { .. } => {
                    return Err(StefanError::InvalidParameter(
                        "flux-integral guess needs a Neumann problem".into(),
                    ))
                }
            };
            let beta0 = eval_beta(spec, 0.0)?;
            let samples: Vec<f64> =
                (0..=disc.m()).map(|n| q.eval(disc.time(n)) / beta0).collect();
            BoundaryCurve::new(trapezoid_prefix(&samples, disc.dt()))
        }
        InitialGuess::UserCurve(curve) => {
            curve.check_admissible()?;
            if curve.len() != disc.m() + 1 {
                return Err(StefanError::LengthMismatch(format!(
                    "user curve has {} nodes, grid needs {}",
                    curve.len(),
                    disc.m() + 1
                )));
            }
            Ok(curve.clone())
        }
    }
}

/// Lifts non-initial nodes to the admissibility floor, counting how many
/// needed it.
fn clamp_to_admissible(curve: BoundaryCurve) -> (BoundaryCurve, usize) {
    let mut values = curve.values().to_vec();
    let mut clamped = 0;
    for v in values.iter_mut().skip(1) {
        if *v < CURVE_FLOOR {
            *v = CURVE_FLOOR;
            clamped += 1;
        }
    }
    values[0] = 0.0;
    (BoundaryCurve::from_values_unchecked(values), clamped)
}

fn sign_at_max_deviation(curve: &BoundaryCurve, reference: &BoundaryCurve) -> i8 {
    let mut worst = 0.0f64;
    let mut sign = 0i8;
    for (a, b) in curve.values().iter().zip(reference.values()) {
        let dev = a - b;
        if dev.abs() > worst {
            worst = dev.abs();
            sign = if dev > 0.0 { 1 } else { -1 };
        }
    }
    sign
}

/// Runs the relaxed fixed-point iteration. Each step applies the
/// mode-appropriate update transform (divergence form for constant beta,
/// direct form otherwise) followed by the relaxation, floors the result to
/// admissibility, and measures the sup-norm change.
pub fn run_iteration(
    spec: &ProblemSpec,
    disc: &Discretization,
    cfg: &IterationConfig,
    reference: Option<&BoundaryCurve>,
) -> Result<IterationReport> {
    let mut current = initial_curve(spec, disc, &cfg.initial)?;
    let mut report = IterationReport {
        iterates: vec![current.clone()],
        deltas: Vec::new(),
        converged: false,
        clamp_events: 0,
        clamps_per_iteration: Vec::new(),
        sign_pattern: Vec::new(),
    };

    for iteration in 1..=cfg.max_iter {
        let transformed = apply_r(spec, disc, &current)
            .map_err(|e| StefanError::IterationFailed { iteration, source: Box::new(e) })?;
        let relaxed = apply_p(&cfg.operator, &transformed, &current)?;
        let (next, clamped) = clamp_to_admissible(relaxed);
        report.clamp_events += clamped;
        report.clamps_per_iteration.push(clamped);

        let delta = next.sup_distance(&current);
        report.deltas.push(delta);
        if let Some(reference) = reference {
            report.sign_pattern.push(sign_at_max_deviation(&next, reference));
        }
        report.iterates.push(next.clone());
        current = next;

        if delta < cfg.tol {
            report.converged = true;
            break;
        }
        if let Some(threshold) = cfg.residual_stop {
            let residual = discrepancy(spec, disc, &current)
                .map_err(|e| StefanError::IterationFailed { iteration, source: Box::new(e) })?
                .max_residual();
            if residual < threshold {
                report.converged = true;
                break;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{builtin_example, Beta, ExampleId, TimeFn};

    fn disc(n: usize) -> Discretization {
        Discretization::new(n, n, 1.0).unwrap()
    }

    #[test]
    fn linear_slope_guess_is_a_ramp() {
        let d = Discretization::new(2, 10, 1.0).unwrap();
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = initial_curve(&spec, &d, &InitialGuess::LinearSlope { c: 1.0 }).unwrap();
        for n in 0..=10 {
            assert!((curve.get(n) - 0.1 * n as f64).abs() < 1e-15);
        }
        assert!(initial_curve(&spec, &d, &InitialGuess::LinearSlope { c: 0.0 }).is_err());
    }

    #[test]
    fn flux_integral_guess_matches_closed_forms() {
        let d = disc(10);
        let unit_flux = ProblemSpec::new(
            BoundaryCondition::Neumann { q: TimeFn::new(|_| 1.0) },
            Beta::Constant(1.0),
            1.0,
        )
        .unwrap();
        let curve = initial_curve(&unit_flux, &d, &InitialGuess::FluxIntegral).unwrap();
        for n in 0..=10 {
            assert!((curve.get(n) - d.time(n)).abs() < 1e-14, "constant flux node {n}");
        }

        let (exp_flux, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let curve = initial_curve(&exp_flux, &d, &InitialGuess::FluxIntegral).unwrap();
        for n in 1..=10 {
            let t = d.time(n);
            let exact = t.exp() - 1.0;
            assert!(
                (curve.get(n) - exact).abs() < 2e-3,
                "node {n}: {} vs {exact}",
                curve.get(n)
            );
        }
    }

    #[test]
    fn flux_integral_guess_rejects_dirichlet_problems() {
        let d = disc(10);
        let (spec, _) = builtin_example(ExampleId::I, None).unwrap();
        assert!(initial_curve(&spec, &d, &InitialGuess::FluxIntegral).is_err());
    }

    #[test]
    fn user_curve_is_validated_and_passed_through() {
        let d = Discretization::new(2, 2, 1.0).unwrap();
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let good = BoundaryCurve::new(vec![0.0, 0.3, 0.9]).unwrap();
        let got = initial_curve(&spec, &d, &InitialGuess::UserCurve(good.clone())).unwrap();
        assert_eq!(got.values(), good.values());

        let wrong_len = BoundaryCurve::new(vec![0.0, 0.3]).unwrap();
        assert!(initial_curve(&spec, &d, &InitialGuess::UserCurve(wrong_len)).is_err());
        let bad = BoundaryCurve::from_values_unchecked(vec![0.0, -0.3, 0.9]);
        assert!(initial_curve(&spec, &d, &InitialGuess::UserCurve(bad)).is_err());
    }

    #[test]
    fn identity_operator_returns_the_initial_curve() {
        let d = disc(10);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let cfg = IterationConfig::new(
            1e-6,
            1,
            OperatorConfig::new(0.0).unwrap(),
            InitialGuess::LinearSlope { c: 1.0 },
        )
        .unwrap();
        let report = run_iteration(&spec, &d, &cfg, None).unwrap();
        assert_eq!(report.iterations(), 1);
        assert_eq!(report.deltas[0], 0.0);
        assert!(report.converged);
        assert_eq!(report.final_curve().values(), report.iterates[0].values());
    }

    #[test]
    fn neumann_benchmark_converges_to_the_exact_front() {
        let d = disc(20);
        let (spec, exact) = builtin_example(ExampleId::Ii, None).unwrap();
        let exact = exact.unwrap();
        let cfg = IterationConfig::new(
            1e-6,
            200,
            OperatorConfig::default(),
            InitialGuess::LinearSlope { c: 0.5 },
        )
        .unwrap();
        let report = run_iteration(&spec, &d, &cfg, None).unwrap();
        assert!(report.converged, "no convergence in {} iterations", report.iterations());
        assert!(report.iterations() < 100, "took {} iterations", report.iterations());
        let worst: f64 = (0..=d.m())
            .map(|n| (report.final_curve().get(n) - exact.interface(d.time(n))).abs())
            .fold(0.0, f64::max)
            ;
        assert!(worst <= 1e-2, "front error {worst}");
    }

    #[test]
    fn unrelaxed_update_oscillates_around_the_fixed_point() {
        let d = disc(20);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let reference = BoundaryCurve::sample(&d, |t| t);
        let cfg = IterationConfig::new(
            1e-12,
            6,
            OperatorConfig::new(1.0).unwrap(),
            InitialGuess::LinearSlope { c: 0.5 },
        )
        .unwrap();
        let report = run_iteration(&spec, &d, &cfg, Some(&reference)).unwrap();
        assert!(report.sign_pattern.len() >= 3);
        for k in 1..report.sign_pattern.len().min(4) {
            assert_eq!(
                report.sign_pattern[k],
                -report.sign_pattern[k - 1],
                "signs {:?} do not alternate at {k}",
                report.sign_pattern
            );
        }
    }

    #[test]
    fn relaxed_deltas_contract_in_the_tail() {
        let d = disc(20);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let cfg = IterationConfig::new(
            1e-8,
            200,
            OperatorConfig::default(),
            InitialGuess::LinearSlope { c: 0.5 },
        )
        .unwrap();
        let report = run_iteration(&spec, &d, &cfg, None).unwrap();
        assert!(report.converged);
        let deltas = &report.deltas;
        let tail = deltas.len().saturating_sub(5);
        for k in tail..deltas.len() - 1 {
            assert!(
                deltas[k + 1] <= 0.95 * deltas[k],
                "tail deltas stall: {:?}",
                &deltas[tail..]
            );
        }
    }

    #[test]
    fn one_extra_iteration_barely_moves_a_converged_front() {
        let d = disc(20);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let tol = 1e-6;
        let cfg = IterationConfig::new(
            tol,
            200,
            OperatorConfig::default(),
            InitialGuess::LinearSlope { c: 0.5 },
        )
        .unwrap();
        let report = run_iteration(&spec, &d, &cfg, None).unwrap();
        assert!(report.converged);
        let more = IterationConfig {
            initial: InitialGuess::UserCurve(report.final_curve().clone()),
            max_iter: 1,
            tol: 1e-300,
            operator: OperatorConfig::default(),
            residual_stop: None,
        };
        let next = run_iteration(&spec, &d, &more, None).unwrap();
        assert!(next.deltas[0] < 2.0 * tol, "post-convergence step moved {}", next.deltas[0]);
    }

    #[test]
    fn zero_heating_clamps_the_whole_front_to_the_floor() {
        let d = disc(10);
        let spec = ProblemSpec::new(
            BoundaryCondition::Dirichlet { g: TimeFn::new(|_| 0.0) },
            Beta::Constant(1.0),
            1.0,
        )
        .unwrap();
        let cfg = IterationConfig::new(
            1e-6,
            5,
            OperatorConfig::new(1.0).unwrap(),
            InitialGuess::LinearSlope { c: 1.0 },
        )
        .unwrap();
        let report = run_iteration(&spec, &d, &cfg, None).unwrap();
        // the transform returns exactly zero every node; two iterations
        // (the second converged) clamp M nodes each
        assert!(report.converged);
        assert_eq!(report.iterations(), 2);
        assert_eq!(report.clamp_events, 2 * d.m());
        assert!(report.final_curve().values()[1..].iter().all(|&v| v == CURVE_FLOOR));
    }

    #[test]
    fn residual_stop_halts_without_sup_norm_convergence() {
        let d = disc(20);
        let (spec, _) = builtin_example(ExampleId::Ii, None).unwrap();
        let mut cfg = IterationConfig::new(
            1e-14, // unreachable sup-norm tolerance
            50,
            OperatorConfig::default(),
            InitialGuess::LinearSlope { c: 0.5 },
        )
        .unwrap();
        cfg.residual_stop = Some(0.5);
        let report = run_iteration(&spec, &d, &cfg, None).unwrap();
        assert!(report.converged);
        assert!(report.iterations() < 50);
    }
}
