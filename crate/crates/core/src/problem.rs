//! Problem instances: the heating mode at `x = 0`, the latent-heat
//! coefficient `beta(x)`, the horizon, and the built-in benchmark examples
//! with their exact solutions where known.
//!
//! Sign convention for Neumann heating: the user supplies a flux magnitude
//! `q(t) >= 0` and the physical condition is `U_x(0,t) = -q(t)` (heat flows
//! into the liquid). All downstream formulas are written in this convention.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, StefanError};
use crate::expr::Expr;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function of time with an optional closed-form label for reports.
#[derive(Clone)]
pub struct TimeFn {
    f: ScalarFn,
    label: Option<String>,
}

impl TimeFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), label: None }
    }

    pub fn with_label(f: impl Fn(f64) -> f64 + Send + Sync + 'static, label: impl Into<String>) -> Self {
        Self { f: Arc::new(f), label: Some(label.into()) }
    }

    pub fn from_expr(expr: Expr) -> Self {
        let label = expr.to_string();
        Self { f: Arc::new(move |t| expr.eval(t)), label: Some(label) }
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }
}

impl fmt::Debug for TimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TimeFn({})", self.label.as_deref().unwrap_or("<closure>"))
    }
}

/// Heating mode at the origin.
#[derive(Debug, Clone)]
pub enum BoundaryCondition {
    /// Prescribed temperature `U(0,t) = g(t)`, `g >= 0`.
    Dirichlet { g: TimeFn },
    /// Prescribed flux magnitude: `U_x(0,t) = -q(t)`, `q > 0`.
    Neumann { q: TimeFn },
}

impl BoundaryCondition {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, BoundaryCondition::Dirichlet { .. })
    }

    pub fn is_neumann(&self) -> bool {
        matches!(self, BoundaryCondition::Neumann { .. })
    }
}

/// Latent-heat over diffusivity coefficient `beta(x) > 0`.
#[derive(Clone)]
pub enum Beta {
    Constant(f64),
    Variable { f: ScalarFn, label: Option<String> },
}

impl Beta {
    pub fn variable(f: impl Fn(f64) -> f64 + Send + Sync + 'static, label: Option<String>) -> Self {
        Self::Variable { f: Arc::new(f), label }
    }

    pub fn from_expr(expr: Expr) -> Self {
        if expr.is_constant() {
            Self::Constant(expr.eval(0.0))
        } else {
            let label = expr.to_string();
            Self::Variable { f: Arc::new(move |x| expr.eval(x)), label: Some(label) }
        }
    }

    /// Constant value when the coefficient does not depend on position.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Beta::Constant(v) => Some(*v),
            Beta::Variable { .. } => None,
        }
    }
}

impl fmt::Debug for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Constant(v) => write!(f, "Beta({v})"),
            Beta::Variable { label, .. } => {
                write!(f, "Beta({})", label.as_deref().unwrap_or("<closure>"))
            }
        }
    }
}

/// A complete melting problem: heating mode, latent-heat coefficient, horizon.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub bc: BoundaryCondition,
    pub beta: Beta,
    pub horizon: f64,
}

impl ProblemSpec {
    pub fn new(bc: BoundaryCondition, beta: Beta, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(StefanError::InvalidParameter(format!(
                "horizon must be finite and positive, got {horizon}"
            )));
        }
        if let Beta::Constant(v) = beta {
            if !(v.is_finite() && v > 0.0) {
                return Err(StefanError::CoefficientOutOfRange(format!(
                    "constant beta must be positive, got {v}"
                )));
            }
        }
        Ok(Self { bc, beta, horizon })
    }
}

/// Evaluates `beta(x)`, rejecting nonpositive values of a user-supplied
/// coefficient.
pub fn eval_beta(spec: &ProblemSpec, x: f64) -> Result<f64> {
    let value = match &spec.beta {
        Beta::Constant(v) => *v,
        Beta::Variable { f, .. } => f(x),
    };
    if !(value.is_finite() && value > 0.0) {
        return Err(StefanError::CoefficientOutOfRange(format!(
            "beta({x}) = {value} must be positive"
        )));
    }
    Ok(value)
}

/// Closed-form reference solution attached to benchmark problems.
#[derive(Clone)]
pub struct ExactSolution {
    temperature: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    interface: ScalarFn,
}

impl ExactSolution {
    pub fn new(
        temperature: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        interface: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { temperature: Arc::new(temperature), interface: Arc::new(interface) }
    }

    pub fn temperature(&self, x: f64, t: f64) -> f64 {
        (self.temperature)(x, t)
    }

    pub fn interface(&self, t: f64) -> f64 {
        (self.interface)(t)
    }
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactSolution")
    }
}

/// Identifier of the built-in benchmark examples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleId {
    /// Dirichlet heating `g(t) = e^t - 1`; exact `U = e^(t-x) - 1`, `s = t`.
    I,
    /// Neumann heating `q(t) = e^t`; same exact solution.
    Ii,
    /// Dirichlet heating `g(t) = 1 - eps sin(omega t)`; no exact solution.
    Iii,
}

impl std::str::FromStr for ExampleId {
    type Err = StefanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(ExampleId::I),
            "ii" | "2" => Ok(ExampleId::Ii),
            "iii" | "3" => Ok(ExampleId::Iii),
            other => Err(StefanError::InvalidParameter(format!(
                "unknown example '{other}' (expected i, ii or iii)"
            ))),
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleId::I => write!(f, "i"),
            ExampleId::Ii => write!(f, "ii"),
            ExampleId::Iii => write!(f, "iii"),
        }
    }
}

/// Amplitude / frequency of the oscillating Dirichlet example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillationParams {
    pub eps: f64,
    pub omega: f64,
}

impl Default for OscillationParams {
    fn default() -> Self {
        Self { eps: 0.1, omega: 2.0 * std::f64::consts::PI }
    }
}

/// Builds one of the three benchmark problems (`beta = 1`, horizon 1).
/// Examples i and ii carry the exact pair `U = e^(t-x) - 1`, `s(t) = t`.
pub fn builtin_example(
    id: ExampleId,
    params: Option<OscillationParams>,
) -> Result<(ProblemSpec, Option<ExactSolution>)> {
    let horizon = 1.0;
    let exact = ExactSolution::new(|x, t| (t - x).exp() - 1.0, |t| t);
    match id {
        ExampleId::I => {
            let bc = BoundaryCondition::Dirichlet {
                g: TimeFn::with_label(|t: f64| t.exp() - 1.0, "exp(t) - 1"),
            };
            let spec = ProblemSpec::new(bc, Beta::Constant(1.0), horizon)?;
            Ok((spec, Some(exact)))
        }
        ExampleId::Ii => {
            let bc = BoundaryCondition::Neumann {
                q: TimeFn::with_label(|t: f64| t.exp(), "exp(t)"),
            };
            let spec = ProblemSpec::new(bc, Beta::Constant(1.0), horizon)?;
            Ok((spec, Some(exact)))
        }
        ExampleId::Iii => {
            let OscillationParams { eps, omega } = params.unwrap_or_default();
            if !(0.0..1.0).contains(&eps) {
                return Err(StefanError::InvalidParameter(format!(
                    "oscillation amplitude must lie in [0,1), got {eps}"
                )));
            }
            if !(omega.is_finite() && omega > 0.0) {
                return Err(StefanError::InvalidParameter(format!(
                    "oscillation frequency must be positive, got {omega}"
                )));
            }
            let bc = BoundaryCondition::Dirichlet {
                g: TimeFn::with_label(
                    move |t: f64| 1.0 - eps * (omega * t).sin(),
                    format!("1 - {eps}*sin({omega}*t)"),
                ),
            };
            let spec = ProblemSpec::new(bc, Beta::Constant(1.0), horizon)?;
            Ok((spec, None))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_i_is_dirichlet_with_exact_pair() {
        let (spec, exact) = builtin_example(ExampleId::I, None).unwrap();
        assert!(spec.bc.is_dirichlet());
        assert_eq!(spec.beta.as_constant(), Some(1.0));
        let exact = exact.expect("example i carries an exact solution");
        if let BoundaryCondition::Dirichlet { g } = &spec.bc {
            assert!((g.eval(1.0) - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        }
        // boundary data matches the exact temperature at x = 0
        assert!((exact.temperature(0.0, 0.7) - (0.7f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn example_ii_is_neumann_with_exact_pair() {
        let (spec, exact) = builtin_example(ExampleId::Ii, None).unwrap();
        assert!(spec.bc.is_neumann());
        assert!(exact.is_some());
        if let BoundaryCondition::Neumann { q } = &spec.bc {
            assert!((q.eval(0.5) - 0.5f64.exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn example_iii_zero_amplitude_is_constant_heating() {
        let (spec, exact) =
            builtin_example(ExampleId::Iii, Some(OscillationParams { eps: 0.0, omega: 1.0 }))
                .unwrap();
        assert!(exact.is_none());
        if let BoundaryCondition::Dirichlet { g } = &spec.bc {
            for t in [0.0, 0.3, 0.9] {
                assert_eq!(g.eval(t), 1.0);
            }
        }
    }

    #[test]
    fn example_iii_rejects_bad_parameters() {
        assert!(builtin_example(ExampleId::Iii, Some(OscillationParams { eps: 1.0, omega: 1.0 }))
            .is_err());
        assert!(builtin_example(ExampleId::Iii, Some(OscillationParams { eps: -0.1, omega: 1.0 }))
            .is_err());
        assert!(builtin_example(ExampleId::Iii, Some(OscillationParams { eps: 0.1, omega: 0.0 }))
            .is_err());
    }

    #[test]
    fn exact_pair_satisfies_interface_conditions() {
        // s(t) = t, U = e^(t-x) - 1: the melting-front balance
        // beta * ds/dt = -U_x(s(t), t) reduces to 1 = e^0, exactly.
        let (_, exact) = builtin_example(ExampleId::Ii, None).unwrap();
        let exact = exact.unwrap();
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let s = exact.interface(t);
            assert_eq!(exact.temperature(s, t), 0.0, "U(s(t),t) at t={t}");
            // -U_x(s,t) = e^(t-s) = 1 for s = t; ds/dt = 1
            let minus_ux = (t - s).exp();
            assert_eq!(minus_ux - 1.0, 0.0, "flux balance at t={t}");
        }
        // interface starts at the origin and is nondecreasing
        assert_eq!(exact.interface(0.0), 0.0);
        for k in 1..=10 {
            assert!(exact.interface(k as f64 / 10.0) >= exact.interface((k - 1) as f64 / 10.0));
        }
    }

    #[test]
    fn eval_beta_constant_and_affine() {
        let (spec, _) = builtin_example(ExampleId::I, None).unwrap();
        assert_eq!(eval_beta(&spec, 0.0).unwrap(), 1.0);
        assert_eq!(eval_beta(&spec, 17.3).unwrap(), 1.0);

        let spec = ProblemSpec::new(
            BoundaryCondition::Neumann { q: TimeFn::new(|t: f64| t.exp()) },
            Beta::variable(|x| 1.0 + x, Some("1+x".into())),
            1.0,
        )
        .unwrap();
        assert_eq!(eval_beta(&spec, 0.0).unwrap(), 1.0);
        assert_eq!(eval_beta(&spec, 0.5).unwrap(), 1.5);
    }

    #[test]
    fn eval_beta_rejects_nonpositive_coefficient() {
        let spec = ProblemSpec::new(
            BoundaryCondition::Dirichlet { g: TimeFn::new(|_| 1.0) },
            Beta::variable(|x| 1.0 - x, None),
            1.0,
        )
        .unwrap();
        assert!(eval_beta(&spec, 0.5).is_ok());
        assert!(eval_beta(&spec, 1.0).is_err());
        assert!(eval_beta(&spec, 2.0).is_err());
    }

    #[test]
    fn example_id_parses_from_str() {
        assert_eq!("ii".parse::<ExampleId>().unwrap(), ExampleId::Ii);
        assert_eq!("III".parse::<ExampleId>().unwrap(), ExampleId::Iii);
        assert!("iv".parse::<ExampleId>().is_err());
    }

    #[test]
    fn beta_from_expr_detects_constants() {
        let c = Beta::from_expr(crate::expr::Expr::parse("2*3", "x").unwrap());
        assert_eq!(c.as_constant(), Some(6.0));
        let v = Beta::from_expr(crate::expr::Expr::parse("1+x", "x").unwrap());
        assert_eq!(v.as_constant(), None);
    }
}
