//! Closed-form solutions used as ground truth.
//!
//! For `D_t^δ v - v_xx = 0` on `(0, π)` with zero boundary values and
//! `v(x, 0) = Σ c_k sin(kx)` (plus `v_t(x, 0) = 0` when `δ > 1`), the solution is
//! `v(x, t) = Σ c_k E_δ(-k² t^δ) sin(kx)`. Its time derivatives blow up like
//! `t^{δ-1}` (and `t^{δ-2}` for the second derivative) as `t → 0⁺`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::expr::{Expr, Var};
use crate::specialfn::{
    mittag_leffler, ml_second_time_derivative_scaled, ml_time_derivative_scaled,
};
use crate::{Error, FractionalOrder, Result, SeriesEvalConfig};

/// `c · sin(kx)`, an eigenfunction of `-∂²/∂x²` on `(0, π)` with eigenvalue `k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenMode {
    k: u32,
    coefficient: f64,
}

impl EigenMode {
    pub fn new(k: u32, coefficient: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("wavenumber must be at least 1"));
        }
        if !coefficient.is_finite() {
            return Err(Error::Domain { what: "mode coefficient must be finite", value: coefficient });
        }
        Ok(Self { k, coefficient })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn eigenvalue(&self) -> f64 {
        let k = f64::from(self.k);
        k * k
    }

    /// `sin(kx)`, exactly zero at both ends of `[0, π]`.
    pub fn shape(&self, x: f64) -> f64 {
        if x == 0.0 || x == PI {
            0.0
        } else {
            libm::sin(f64::from(self.k) * x)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactProblem {
    delta: FractionalOrder,
    modes: Vec<EigenMode>,
    horizon: f64,
    series: SeriesEvalConfig,
}

impl ExactProblem {
    pub fn new(delta: FractionalOrder, modes: Vec<EigenMode>, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || horizon.is_infinite() {
            return Err(Error::Domain { what: "time horizon must be positive", value: horizon });
        }
        Ok(Self { delta, modes, horizon, series: SeriesEvalConfig::default() })
    }

    /// Single mode `k = 1`, `c = 1`: `v = E_δ(-t^δ) sin x`.
    pub fn single_mode(delta: FractionalOrder, horizon: f64) -> Result<Self> {
        Self::new(delta, alloc::vec![EigenMode { k: 1, coefficient: 1.0 }], horizon)
    }

    pub fn with_series_config(mut self, series: SeriesEvalConfig) -> Self {
        self.series = series;
        self
    }

    pub fn delta(&self) -> FractionalOrder {
        self.delta
    }

    pub fn modes(&self) -> &[EigenMode] {
        &self.modes
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `Σ c_k sin(kx)`.
    pub fn initial_value(&self, x: f64) -> f64 {
        self.modes.iter().map(|m| m.coefficient * m.shape(x)).sum()
    }

    fn check(&self, x: f64, t: f64) -> Result<()> {
        if !(0.0..=PI).contains(&x) {
            return Err(Error::Domain { what: "x must lie in [0, π]", value: x });
        }
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain { what: "t must lie in [0, T]", value: t });
        }
        Ok(())
    }

    /// `E_δ(-k² t^δ)`.
    pub fn time_factor(&self, mode: &EigenMode, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(1.0);
        }
        let d = self.delta.value();
        mittag_leffler(d, -mode.eigenvalue() * libm::pow(t, d), &self.series)
    }

    pub fn exact_value(&self, x: f64, t: f64) -> Result<f64> {
        self.check(x, t)?;
        self.modes.iter().try_fold(0.0, |acc, m| {
            Ok(acc + m.coefficient * m.shape(x) * self.time_factor(m, t)?)
        })
    }

    /// `∂v/∂t` for `t > 0`.
    pub fn exact_dt(&self, x: f64, t: f64) -> Result<f64> {
        self.check(x, t)?;
        if t == 0.0 {
            return Err(Error::Domain { what: "v_t is singular at t = 0", value: t });
        }
        self.modes.iter().try_fold(0.0, |acc, m| {
            let dt = ml_time_derivative_scaled(self.delta, m.eigenvalue(), t, &self.series)?;
            Ok(acc + m.coefficient * m.shape(x) * dt)
        })
    }

    /// `∂²v/∂t²` for `t > 0`; only for `δ ∈ (1,2)`.
    pub fn exact_dtt(&self, x: f64, t: f64) -> Result<f64> {
        self.check(x, t)?;
        if t == 0.0 {
            return Err(Error::Domain { what: "v_tt is singular at t = 0", value: t });
        }
        self.modes.iter().try_fold(0.0, |acc, m| {
            let dtt = ml_second_time_derivative_scaled(self.delta, m.eigenvalue(), t, &self.series)?;
            Ok(acc + m.coefficient * m.shape(x) * dtt)
        })
    }

    /// `∂^{δ̄} v / ∂t^{δ̄}`, the integrand of the Caputo derivative.
    pub fn exact_upper_derivative(&self, x: f64, t: f64) -> Result<f64> {
        match self.delta.ceiling() {
            1 => self.exact_dt(x, t),
            _ => self.exact_dtt(x, t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Exponent of the blow-up at `t = 0`: `δ - 1` for `v_t`, `δ - 2` for `v_tt`.
pub fn singular_exponent_reference(delta: FractionalOrder, which: DerivativeOrder) -> Result<f64> {
    match which {
        DerivativeOrder::First => Ok(delta.value() - 1.0),
        DerivativeOrder::Second if delta.ceiling() == 2 => Ok(delta.value() - 2.0),
        DerivativeOrder::Second => Err(Error::OrderMismatch { expected: 2, delta: delta.value() }),
    }
}

/// A closed-form solution `u(x, t)` given as a catalog expression, typically built
/// together with the source term that makes it solve a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedSolution {
    u: Expr,
}

impl ManufacturedSolution {
    pub fn new(u: Expr) -> Self {
        Self { u }
    }

    pub fn expr(&self) -> &Expr {
        &self.u
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        self.u.eval(x, t)
    }

    /// `∂^n u / ∂t^n` as an expression.
    pub fn time_derivative(&self, n: u32) -> Expr {
        self.u.diff_n(Var::T, n)
    }
}

/// Anything that can supply reference values of `u` on a spatial row at time `t`.
pub trait ReferenceSolution {
    fn level(&self, t: f64, xs: &[f64], out: &mut [f64]) -> Result<()>;
}

impl ReferenceSolution for ExactProblem {
    fn level(&self, t: f64, xs: &[f64], out: &mut [f64]) -> Result<()> {
        if xs.len() != out.len() {
            return Err(Error::DimensionMismatch { expected: xs.len(), found: out.len() });
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        for m in &self.modes {
            let factor = m.coefficient * self.time_factor(m, t)?;
            for (v, &x) in out.iter_mut().zip(xs) {
                self.check(x, t)?;
                *v += factor * m.shape(x);
            }
        }
        Ok(())
    }
}

impl ReferenceSolution for ManufacturedSolution {
    fn level(&self, t: f64, xs: &[f64], out: &mut [f64]) -> Result<()> {
        if xs.len() != out.len() {
            return Err(Error::DimensionMismatch { expected: xs.len(), found: out.len() });
        }
        for (v, &x) in out.iter_mut().zip(xs) {
            *v = self.u.eval(x, t);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caputo::caputo_quadrature;
    use crate::fit::loglog_slope;
    use crate::specialfn::gamma;
    use approx::assert_relative_eq;
    use core::f64::consts::FRAC_PI_2;

    fn order(d: f64) -> FractionalOrder {
        FractionalOrder::new(d).unwrap()
    }

    #[test]
    fn initial_and_boundary_values() {
        let p = ExactProblem::single_mode(order(0.5), 1.0).unwrap();
        assert_eq!(p.exact_value(FRAC_PI_2, 0.0).unwrap(), 1.0);
        assert_eq!(p.exact_value(0.0, 0.7).unwrap(), 0.0);
        assert_eq!(p.exact_value(PI, 0.7).unwrap(), 0.0);
        let multi = ExactProblem::new(
            order(0.5),
            alloc::vec![EigenMode::new(1, 1.0).unwrap(), EigenMode::new(3, -0.5).unwrap()],
            1.0,
        )
        .unwrap();
        for &x in &[0.2, 1.0, 2.5] {
            assert_eq!(multi.exact_value(x, 0.0).unwrap(), multi.initial_value(x));
        }
    }

    #[test]
    fn half_order_value_is_mittag_leffler() {
        let p = ExactProblem::single_mode(order(0.5), 1.0).unwrap();
        let cfg = SeriesEvalConfig::default();
        let want = mittag_leffler(0.5, -1.0, &cfg).unwrap();
        assert_eq!(p.exact_value(FRAC_PI_2, 1.0).unwrap(), want);
        // independent partial sums of Σ (-1)^k / Γ(k/2 + 1)
        let partial: f64 = (0..80)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign / gamma(0.5 * k as f64 + 1.0).unwrap()
            })
            .sum();
        assert!((want - partial).abs() < 1e-14);
    }

    #[test]
    fn classical_heat_limit() {
        // δ = 1 is not an admissible order; the limit uses E_1(-t) = e^{-t} directly.
        let cfg = SeriesEvalConfig::default();
        let v = mittag_leffler(1.0, -1.0, &cfg).unwrap() * libm::sin(FRAC_PI_2);
        assert_relative_eq!(v, 0.367_879_441_171_442_3, epsilon = 1e-15);
    }

    #[test]
    fn derivative_leading_terms() {
        let p = ExactProblem::single_mode(order(0.5), 1.0).unwrap();
        let v = p.exact_dt(FRAC_PI_2, 1e-6).unwrap();
        assert_relative_eq!(v, -564.19, max_relative = 2e-3);

        let p = ExactProblem::single_mode(order(1.5), 1.0).unwrap();
        let v = p.exact_dtt(FRAC_PI_2, 1e-6).unwrap();
        assert_relative_eq!(v.abs(), 1000.0 / libm::sqrt(PI), max_relative = 1e-3);
    }

    #[test]
    fn node_of_second_mode_gives_zero_derivative() {
        let p = ExactProblem::new(order(0.5), alloc::vec![EigenMode::new(2, 1.0).unwrap()], 1.0).unwrap();
        for &t in &[1e-6, 0.1, 0.9] {
            assert!(p.exact_dt(FRAC_PI_2, t).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        let p = ExactProblem::single_mode(order(0.5), 1.0).unwrap();
        assert!(p.exact_value(-0.1, 0.5).is_err());
        assert!(p.exact_value(1.0, 1.5).is_err());
        assert!(p.exact_dt(1.0, 0.0).is_err());
        assert!(p.exact_dtt(1.0, 0.5).is_err());
        assert!(EigenMode::new(0, 1.0).is_err());
    }

    #[test]
    fn multimode_derivative_matches_finite_difference() {
        let p = ExactProblem::new(
            order(0.7),
            alloc::vec![EigenMode::new(1, 1.0).unwrap(), EigenMode::new(2, 0.3).unwrap()],
            1.0,
        )
        .unwrap();
        let (x, t, h) = (0.6, 0.5, 1e-6);
        let fd = (p.exact_value(x, t + h).unwrap() - p.exact_value(x, t - h).unwrap()) / (2.0 * h);
        assert!((p.exact_dt(x, t).unwrap() - fd).abs() < 1e-8);

        let p = ExactProblem::new(order(1.4), alloc::vec![EigenMode::new(2, 0.8).unwrap()], 1.0).unwrap();
        let h = 1e-4;
        let fd = (p.exact_value(x, t + h).unwrap() - 2.0 * p.exact_value(x, t).unwrap()
            + p.exact_value(x, t - h).unwrap())
            / (h * h);
        assert!((p.exact_dtt(x, t).unwrap() - fd).abs() < 1e-5);
    }

    #[test]
    fn pde_residual_via_quadrature() {
        for (d, k) in [(0.5, 1u32), (0.7, 2), (1.5, 1)] {
            let delta = order(d);
            let p = ExactProblem::new(delta, alloc::vec![EigenMode::new(k, 1.0).unwrap()], 1.0).unwrap();
            let x = 0.4;
            for &t in &[0.3, 1.0] {
                let lhs = caputo_quadrature(|s| p.exact_upper_derivative(x, s).unwrap(), delta, t, 1e-10)
                    .unwrap();
                let rhs = -f64::from(k * k) * p.exact_value(x, t).unwrap();
                assert!((lhs - rhs).abs() < 1e-8, "δ={d} k={k} t={t}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn wave_case_initial_velocity_vanishes() {
        let p = ExactProblem::single_mode(order(1.5), 1.0).unwrap();
        let x = FRAC_PI_2;
        let mut last = f64::MAX;
        for &h in &[1e-2, 1e-3, 1e-4] {
            let q = ((p.exact_value(x, h).unwrap() - p.exact_value(x, 0.0).unwrap()) / h).abs();
            assert!(q < last);
            last = q;
        }
        // (v(h) - v(0))/h ≈ -h^{1/2}/Γ(5/2)
        assert!(last < 1e-2);
    }

    #[test]
    fn first_derivative_slope_half_order() {
        let p = ExactProblem::single_mode(order(0.5), 1.0).unwrap();
        let pts: Vec<(f64, f64)> = (0..=12)
            .map(|i| {
                let t = libm::pow(10.0, -6.0 + 0.25 * f64::from(i));
                (t, p.exact_dt(1.0, t).unwrap().abs())
            })
            .collect();
        assert!((loglog_slope(&pts).unwrap() + 0.5).abs() < 0.02);
    }

    #[test]
    fn large_arguments_are_refused_not_garbled() {
        // E_0.3(-16 t^0.3) cannot be resolved by the power series
        let p = ExactProblem::new(order(0.3), alloc::vec![EigenMode::new(4, 1.0).unwrap()], 1.0).unwrap();
        assert!(matches!(
            p.exact_value(1.0, 0.3),
            Err(Error::Overflow { .. } | Error::PrecisionLoss { .. })
        ));
    }

    #[test]
    fn exponent_reference() {
        assert_relative_eq!(
            singular_exponent_reference(order(0.4), DerivativeOrder::First).unwrap(),
            -0.6,
            epsilon = 1e-15
        );
        assert_eq!(singular_exponent_reference(order(1.5), DerivativeOrder::Second).unwrap(), -0.5);
        assert!(singular_exponent_reference(order(0.5), DerivativeOrder::Second).is_err());
        let near_one = singular_exponent_reference(order(0.999_999), DerivativeOrder::First).unwrap();
        assert!(near_one < 0.0 && near_one > -1e-5);
    }

    #[test]
    fn reference_levels_agree_with_pointwise_values() {
        let p = ExactProblem::new(
            order(0.5),
            alloc::vec![EigenMode::new(1, 1.0).unwrap(), EigenMode::new(2, 0.25).unwrap()],
            1.0,
        )
        .unwrap();
        let xs = [0.0, 0.5, 1.5, PI];
        let mut out = [0.0; 4];
        p.level(0.3, &xs, &mut out).unwrap();
        for (x, v) in xs.iter().zip(out) {
            assert_relative_eq!(v, p.exact_value(*x, 0.3).unwrap(), epsilon = 1e-15);
        }
    }
}
