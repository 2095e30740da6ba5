//! Uniform space-time grids, the boundary-curve and temperature-field
//! containers, and the quadrature / differentiation stencils shared by the
//! rest of the crate.
//!
//! Space is the front-fixed coordinate `xi in [0,1]` with `N` intervals,
//! time is `t in [0,T]` with `M` steps. All stencils are second order so
//! they do not pollute the scheme's order-2 accuracy.

use crate::error::{Result, StefanError};

/// Floor applied to boundary values by the outer iteration; any `s^n`
/// at or below this is treated as degenerate by the update operators.
pub const CURVE_FLOOR: f64 = 1e-12;

/// Threshold under which a division by `s^n` is refused.
pub const DEGENERACY_GUARD: f64 = 1e-14;

/// Uniform discretization: `N` space intervals on [0,1], `M` time steps on [0,T].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization {
    n: usize,
    m: usize,
    horizon: f64,
}

impl Discretization {
    pub fn new(n: usize, m: usize, horizon: f64) -> Result<Self> {
        if n < 2 {
            return Err(StefanError::InvalidParameter(format!(
                "need at least 2 space intervals, got N={n}"
            )));
        }
        if m < 1 {
            return Err(StefanError::InvalidParameter("need at least 1 time step".into()));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(StefanError::InvalidParameter(format!(
                "horizon must be finite and positive, got {horizon}"
            )));
        }
        Ok(Self { n, m, horizon })
    }

    /// Builds a grid from a target spatial step, with `dt` defaulting to
    /// `dxi` (the step count is rounded so that `M * dt = horizon` exactly).
    pub fn from_steps(dxi: f64, dt: Option<f64>, horizon: f64) -> Result<Self> {
        if !(dxi.is_finite() && dxi > 0.0 && dxi <= 0.5) {
            return Err(StefanError::InvalidParameter(format!(
                "spatial step must lie in (0, 0.5], got {dxi}"
            )));
        }
        let n = (1.0 / dxi).round() as usize;
        if ((n as f64) * dxi - 1.0).abs() > 1e-9 {
            return Err(StefanError::InvalidParameter(format!(
                "spatial step {dxi} does not divide the unit interval"
            )));
        }
        let dt = dt.unwrap_or(dxi);
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StefanError::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let m = (horizon / dt).round().max(1.0) as usize;
        Self::new(n, m, horizon)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dxi(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.m as f64
    }

    pub fn xi(&self, i: usize) -> f64 {
        i as f64 * self.dxi()
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt()
    }

    /// All grid times `t^0 .. t^M`.
    pub fn times(&self) -> Vec<f64> {
        (0..=self.m).map(|n| self.time(n)).collect()
    }

    /// Index of the grid time closest to `t`.
    pub fn time_index(&self, t: f64) -> usize {
        ((t / self.dt()).round() as usize).min(self.m)
    }
}

/// Sampled interface position `s^n` on the time grid, `s^0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve {
    values: Vec<f64>,
}

impl BoundaryCurve {
    /// Validating constructor: `s^0 = 0` and `s^n > 0` for `n >= 1`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let curve = Self { values };
        curve.check_admissible()?;
        Ok(curve)
    }

    /// Wraps raw values without validation. Update operators return raw
    /// transforms that may dip below zero; admissibility is re-checked at
    /// the solver entry.
    pub fn from_values_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    /// Samples `s(t)` on the grid (forcing `s^0 = 0`).
    pub fn sample(disc: &Discretization, s: impl Fn(f64) -> f64) -> Self {
        let mut values: Vec<f64> = (0..=disc.m()).map(|n| s(disc.time(n))).collect();
        values[0] = 0.0;
        Self { values }
    }

    pub fn check_admissible(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(StefanError::InadmissibleCurve("empty curve".into()));
        }
        if self.values[0] != 0.0 {
            return Err(StefanError::InadmissibleCurve(format!(
                "s^0 must be 0, got {}",
                self.values[0]
            )));
        }
        for (n, &v) in self.values.iter().enumerate().skip(1) {
            if !(v.is_finite() && v > 0.0) {
                return Err(StefanError::InadmissibleCurve(format!("s^{n} = {v} must be positive")));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// Sup-norm distance to another curve of the same length.
    pub fn sup_distance(&self, other: &BoundaryCurve) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Transformed temperature `F(xi_i, t^n)` stored column-per-time-step,
/// `(N+1) x (M+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureField {
    values: Vec<f64>,
    rows: usize, // N + 1
    cols: usize, // M + 1
}

impl TemperatureField {
    /// All-zero field; column 0 is the initial condition `F(xi, 0) = 0`.
    pub fn zeros(disc: &Discretization) -> Self {
        let rows = disc.n() + 1;
        let cols = disc.m() + 1;
        Self { values: vec![0.0; rows * cols], rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, n: usize) -> f64 {
        self.values[i + n * self.rows]
    }

    pub fn set(&mut self, i: usize, n: usize, value: f64) {
        self.values[i + n * self.rows] = value;
    }

    pub fn column(&self, n: usize) -> &[f64] {
        &self.values[n * self.rows..(n + 1) * self.rows]
    }

    pub fn set_column(&mut self, n: usize, column: &[f64]) {
        debug_assert_eq!(column.len(), self.rows);
        self.values[n * self.rows..(n + 1) * self.rows].copy_from_slice(column);
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Cumulative trapezoidal integral of uniformly spaced samples;
/// `out[k]` integrates over the first `k` intervals, `out[0] = 0`.
pub fn trapezoid_prefix(samples: &[f64], step: f64) -> Vec<f64> {
    assert!(step > 0.0, "quadrature step must be positive");
    let mut out = Vec::with_capacity(samples.len());
    out.push(0.0);
    for k in 1..samples.len() {
        let inc = 0.5 * step * (samples[k - 1] + samples[k]);
        out.push(out[k - 1] + inc);
    }
    out
}

/// Plain (non-cumulative) trapezoid rule over all samples.
pub fn trapezoid(samples: &[f64], step: f64) -> f64 {
    assert!(step > 0.0, "quadrature step must be positive");
    if samples.len() < 2 {
        return 0.0;
    }
    let interior: f64 = samples[1..samples.len() - 1].iter().sum();
    step * (0.5 * samples[0] + interior + 0.5 * samples[samples.len() - 1])
}

/// Which spatial end a one-sided stencil is anchored at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Left,
    Right,
}

/// Second-order one-sided spatial derivative of `F(., t^n)` at a grid edge:
/// left `(-3F_0 + 4F_1 - F_2)/(2 dxi)`, right `(3F_N - 4F_{N-1} + F_{N-2})/(2 dxi)`.
pub fn one_sided_deriv(field: &TemperatureField, n: usize, edge: Edge, dxi: f64) -> Result<f64> {
    if field.rows() < 3 {
        return Err(StefanError::InvalidParameter(
            "one-sided stencil needs at least 3 spatial nodes".into(),
        ));
    }
    let col = field.column(n);
    let last = col.len() - 1;
    Ok(match edge {
        Edge::Left => (-3.0 * col[0] + 4.0 * col[1] - col[2]) / (2.0 * dxi),
        Edge::Right => (3.0 * col[last] - 4.0 * col[last - 1] + col[last - 2]) / (2.0 * dxi),
    })
}

/// Second-order time derivative of the boundary curve at node `n`:
/// central in the interior, one-sided at the ends.
pub fn boundary_rate(curve: &BoundaryCurve, n: usize, dt: f64) -> Result<f64> {
    let s = curve.values();
    if s.len() < 3 {
        return Err(StefanError::InvalidParameter(
            "boundary rate needs at least 2 time steps".into(),
        ));
    }
    let last = s.len() - 1;
    Ok(if n == 0 {
        (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * dt)
    } else if n == last {
        (3.0 * s[last] - 4.0 * s[last - 1] + s[last - 2]) / (2.0 * dt)
    } else {
        (s[n + 1] - s[n - 1]) / (2.0 * dt)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_prefix_constant_integrand() {
        let samples = vec![1.0; 11];
        let out = trapezoid_prefix(&samples, 0.1);
        for (k, v) in out.iter().enumerate() {
            assert!((v - 0.1 * k as f64).abs() < 1e-15, "out[{k}] = {v}");
        }
    }

    #[test]
    fn trapezoid_prefix_exact_for_linear() {
        let out = trapezoid_prefix(&[0.0, 0.5, 1.0], 0.5);
        assert_eq!(out, vec![0.0, 0.125, 0.5]);
    }

    #[test]
    fn trapezoid_prefix_exponential_matches_antiderivative() {
        let step = 2f64.powi(-10);
        let k = 1024;
        let samples: Vec<f64> = (0..=k).map(|j| (j as f64 * step).exp()).collect();
        let out = trapezoid_prefix(&samples, step);
        let exact = std::f64::consts::E - 1.0;
        assert!((out[k] - exact).abs() < 1e-6, "got {}, want {exact}", out[k]);
    }

    #[test]
    fn trapezoid_prefix_halving_step_quarters_error() {
        let exact = std::f64::consts::E - 1.0;
        let err = |steps: usize| {
            let h = 1.0 / steps as f64;
            let samples: Vec<f64> = (0..=steps).map(|j| (j as f64 * h).exp()).collect();
            (trapezoid_prefix(&samples, h)[steps] - exact).abs()
        };
        let ratio = err(64) / err(128);
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn one_sided_deriv_kills_constants() {
        let disc = Discretization::new(4, 1, 1.0).unwrap();
        let mut field = TemperatureField::zeros(&disc);
        for i in 0..=4 {
            field.set(i, 0, 7.5);
        }
        assert_eq!(one_sided_deriv(&field, 0, Edge::Left, disc.dxi()).unwrap(), 0.0);
        assert_eq!(one_sided_deriv(&field, 0, Edge::Right, disc.dxi()).unwrap(), 0.0);
    }

    #[test]
    fn one_sided_deriv_exact_for_linear_left() {
        let disc = Discretization::new(4, 1, 1.0).unwrap();
        let mut field = TemperatureField::zeros(&disc);
        for i in 0..=4 {
            field.set(i, 0, disc.xi(i));
        }
        let d = one_sided_deriv(&field, 0, Edge::Left, 0.25).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn one_sided_deriv_exact_for_quadratic_right() {
        let disc = Discretization::new(10, 1, 1.0).unwrap();
        let mut field = TemperatureField::zeros(&disc);
        for i in 0..=10 {
            let xi = disc.xi(i);
            field.set(i, 0, xi * xi);
        }
        let d = one_sided_deriv(&field, 0, Edge::Right, 0.1).unwrap();
        assert!((d - 2.0).abs() < 1e-10, "got {d}");
    }

    #[test]
    fn one_sided_deriv_rejects_tiny_grids() {
        let field = TemperatureField { values: vec![0.0; 4], rows: 2, cols: 2 };
        assert!(one_sided_deriv(&field, 0, Edge::Left, 0.5).is_err());
    }

    #[test]
    fn boundary_rate_exact_for_linear() {
        let disc = Discretization::new(2, 10, 1.0).unwrap();
        let curve = BoundaryCurve::sample(&disc, |t| t);
        for n in 0..=10 {
            let rate = boundary_rate(&curve, n, disc.dt()).unwrap();
            assert!((rate - 1.0).abs() < 1e-12, "node {n}: {rate}");
        }
    }

    #[test]
    fn boundary_rate_zero_for_constant() {
        let curve = BoundaryCurve::from_values_unchecked(vec![3.0; 8]);
        for n in 0..8 {
            assert_eq!(boundary_rate(&curve, n, 0.1).unwrap(), 0.0);
        }
    }

    #[test]
    fn boundary_rate_exact_for_quadratic() {
        let disc = Discretization::new(2, 10, 1.0).unwrap();
        let curve = BoundaryCurve::sample(&disc, |t| t * t);
        // d/dt t^2 = 2t, central difference exact for quadratics
        let rate = boundary_rate(&curve, 5, 0.1).unwrap();
        assert!((rate - 1.0).abs() < 1e-12, "got {rate}");
        let end = boundary_rate(&curve, 10, 0.1).unwrap();
        assert!((end - 2.0).abs() < 1e-10, "got {end}");
    }

    #[test]
    fn boundary_rate_needs_two_steps() {
        let curve = BoundaryCurve::from_values_unchecked(vec![0.0, 1.0]);
        assert!(boundary_rate(&curve, 0, 1.0).is_err());
    }

    #[test]
    fn curve_admissibility() {
        assert!(BoundaryCurve::new(vec![0.0, 0.1, 0.2]).is_ok());
        assert!(BoundaryCurve::new(vec![0.1, 0.2]).is_err());
        assert!(BoundaryCurve::new(vec![0.0, 0.0, 0.2]).is_err());
        assert!(BoundaryCurve::new(vec![0.0, -0.1]).is_err());
    }

    #[test]
    fn discretization_validation() {
        assert!(Discretization::new(1, 5, 1.0).is_err());
        assert!(Discretization::new(2, 0, 1.0).is_err());
        assert!(Discretization::new(2, 1, 0.0).is_err());
        assert!(Discretization::new(2, 1, f64::INFINITY).is_err());
        let d = Discretization::from_steps(0.05, None, 1.0).unwrap();
        assert_eq!(d.n(), 20);
        assert_eq!(d.m(), 20);
        assert!(Discretization::from_steps(0.07, None, 1.0).is_err());
    }

    #[test]
    fn field_initial_column_is_zero() {
        let disc = Discretization::new(4, 3, 1.0).unwrap();
        let field = TemperatureField::zeros(&disc);
        for i in 0..=4 {
            assert_eq!(field.get(i, 0), 0.0);
        }
        assert_eq!(field.column(2).len(), 5);
    }
}
