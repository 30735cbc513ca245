//! Diagnostics for the regularity of solutions at `t = 0`.
//!
//! A solution that is smooth up to `t = 0` must have `D_t^δ u → 0` there, so its
//! initial value satisfies the steady equation `L₀φ₀ = f(·, 0)` with
//! `L₀w = -p(·,0) w'' + q(·,0) w' + r(·,0) w`. When `L₀` has unique solvability,
//! `φ₀` is then fixed by `f(·, 0)` and the boundary data alone. Data that violate
//! this force an initial layer with `u_t ~ t^{δ-1}`.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use crate::caputo::{caputo_quadrature, TimeGrid};
use crate::exactsol::{ExactProblem, ManufacturedSolution};
use crate::expr::{Expr, Var};
use crate::fdsolver::{solve, ProblemSpec, SpaceGrid, COMPATIBILITY_TOL};
use crate::fit::loglog_slope;
use crate::tridiag::solve_tridiagonal;
use crate::{Error, FractionalOrder, Result};

/// Number of points used when checking sign conditions on `[a, b]`.
pub const CONDITION_SAMPLES: usize = 10_000;

/// `L₀w = -p₀ w'' + q₀ w' + r₀ w` on `[a, b]`, coefficients frozen at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyOperator {
    a: f64,
    b: f64,
    p0: Expr,
    q0: Expr,
    r0: Expr,
}

impl SteadyOperator {
    /// Any `t` in the coefficients is replaced by 0.
    pub fn new(a: f64, b: f64, p0: Expr, q0: Expr, r0: Expr) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput("interval must satisfy a < b"));
        }
        let op = Self { a, b, p0: p0.at_time(0.0), q0: q0.at_time(0.0), r0: r0.at_time(0.0) };
        let p_min = op.samples().map(|x| op.p0.eval(x, 0.0)).fold(f64::INFINITY, f64::min);
        if !(p_min > 0.0) {
            return Err(Error::NotElliptic { p_min });
        }
        Ok(op)
    }

    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        let (a, b) = spec.interval();
        Self::new(a, b, spec.p().clone(), spec.q().clone(), spec.r().clone())
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn p0(&self) -> &Expr {
        &self.p0
    }

    pub fn q0(&self) -> &Expr {
        &self.q0
    }

    pub fn r0(&self) -> &Expr {
        &self.r0
    }

    /// `L₀w(x)` for an expression `w` in `x`.
    pub fn apply(&self, w: &Expr, x: f64) -> f64 {
        let w1 = w.diff(Var::X);
        let w2 = w1.diff(Var::X);
        self.apply_values(x, w.eval(x, 0.0), w1.eval(x, 0.0), w2.eval(x, 0.0))
    }

    fn apply_values(&self, x: f64, w: f64, w1: f64, w2: f64) -> f64 {
        -self.p0.eval(x, 0.0) * w2 + self.q0.eval(x, 0.0) * w1 + self.r0.eval(x, 0.0) * w
    }

    fn samples(&self) -> impl Iterator<Item = f64> + '_ {
        let last = (CONDITION_SAMPLES - 1) as f64;
        (0..CONDITION_SAMPLES).map(move |i| self.a + (self.b - self.a) * i as f64 / last)
    }
}

/// Which sufficient condition for unique solvability of `L₀w = f, w = ψ on ∂Ω` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption1 {
    /// `r₀ ≥ 0`, so `L₀` obeys a maximum principle.
    MaxPrinciple,
    /// `p₀ ≡ 1` and `r₀ - q₀'/2 > 0`, so the energy identity gives uniqueness.
    EnergyCondition,
    /// Neither condition could be confirmed; uniqueness may still hold.
    Undetermined,
}

/// Checks the maximum-principle condition first, then the energy condition,
/// each on [`CONDITION_SAMPLES`] equally spaced points.
pub fn assumption1_check(op: &SteadyOperator) -> Assumption1 {
    if op.samples().all(|x| op.r0.eval(x, 0.0) >= 0.0) {
        return Assumption1::MaxPrinciple;
    }
    let dq = op.q0.diff(Var::X);
    let unit_p = op.samples().all(|x| op.p0.eval(x, 0.0) == 1.0);
    if unit_p && op.samples().all(|x| op.r0.eval(x, 0.0) - 0.5 * dq.eval(x, 0.0) > 0.0) {
        return Assumption1::EnergyCondition;
    }
    Assumption1::Undetermined
}

/// Solves `L₀w = f0` with `w(a) = psi0.0`, `w(b) = psi0.1` by central differences.
///
/// A singular system is returned as [`Error::SingularSystem`], which signals that
/// the steady problem may not be uniquely solvable.
pub fn forced_initial_condition(
    op: &SteadyOperator,
    f0: &Expr,
    psi0: (f64, f64),
    space: &SpaceGrid,
) -> Result<Vec<f64>> {
    check_space(op, space)?;
    let xs = space.nodes();
    let h = space.spacing();
    let interior = xs.len() - 2;
    let mut lower = vec![0.0; interior];
    let mut diag = vec![0.0; interior];
    let mut upper = vec![0.0; interior];
    let mut rhs = vec![0.0; interior];
    for k in 0..interior {
        let x = xs[k + 1];
        let p = op.p0.eval(x, 0.0);
        let q = op.q0.eval(x, 0.0);
        lower[k] = -p / (h * h) - q / (2.0 * h);
        upper[k] = -p / (h * h) + q / (2.0 * h);
        diag[k] = 2.0 * p / (h * h) + op.r0.eval(x, 0.0);
        rhs[k] = f0.eval(x, 0.0);
    }
    rhs[0] -= lower[0] * psi0.0;
    rhs[interior - 1] -= upper[interior - 1] * psi0.1;
    let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    let mut w = Vec::with_capacity(xs.len());
    w.push(psi0.0);
    w.extend(inner);
    w.push(psi0.1);
    Ok(w)
}

fn check_space(op: &SteadyOperator, space: &SpaceGrid) -> Result<()> {
    let (a, b) = space.interval();
    if (a - op.a).abs() > 1e-12 * (1.0 + a.abs()) || (b - op.b).abs() > 1e-12 * (1.0 + b.abs()) {
        return Err(Error::InvalidInput("space grid does not cover the operator interval"));
    }
    Ok(())
}

/// `max_i |L₀φ₀ - f(·, 0)|` over interior nodes, with exact derivatives of `φ₀`.
pub fn theorem_residual(spec: &ProblemSpec, space: &SpaceGrid) -> Result<f64> {
    let op = SteadyOperator::from_spec(spec)?;
    check_space(&op, space)?;
    let f0 = spec.f().at_time(0.0);
    let xs = space.nodes();
    Ok(xs[1..xs.len() - 1]
        .iter()
        .map(|&x| (op.apply(spec.phi0(), x) - f0.eval(x, 0.0)).abs())
        .fold(0.0, f64::max))
}

/// The same residual for a grid function, with `w'` and `w''` by central differences.
///
/// The consistency error of the differences is `O(h²)`; callers compare
/// against [`GridResidual::floor`] = `h²`.
pub fn grid_residual(op: &SteadyOperator, f0: &Expr, values: &[f64], space: &SpaceGrid) -> Result<GridResidual> {
    check_space(op, space)?;
    let xs = space.nodes();
    if values.len() != xs.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: values.len() });
    }
    let h = space.spacing();
    let residual = (1..xs.len() - 1)
        .map(|i| {
            let w1 = (values[i + 1] - values[i - 1]) / (2.0 * h);
            let w2 = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
            (op.apply_values(xs[i], values[i], w1, w2) - f0.eval(xs[i], 0.0)).abs()
        })
        .fold(0.0, f64::max);
    Ok(GridResidual { residual, floor: h * h })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResidual {
    pub residual: f64,
    /// `h²`, the size of the differencing error.
    pub floor: f64,
}

/// A solution with a known `∂^{δ̄}u/∂t^{δ̄}`, used to evaluate `D_t^δ u` by quadrature.
#[derive(Debug, Clone, Copy)]
pub enum LimitSubject<'a> {
    Exact(&'a ExactProblem),
    Manufactured(&'a ManufacturedSolution, FractionalOrder),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub x: f64,
    /// `(t, D_t^δ u(x, t))` in the order the samples were given.
    pub samples: Vec<(f64, f64)>,
    /// The value at the smallest `t`.
    pub limit_estimate: f64,
    /// `|limit_estimate| ≤ LIMIT_ZERO_TOL`.
    pub tends_to_zero: bool,
}

/// Threshold below which the sampled `D_t^δ u` is taken to vanish at `t → 0⁺`.
pub const LIMIT_ZERO_TOL: f64 = 1e-3;

const LIMIT_QUADRATURE_TOL: f64 = 1e-9;

/// Evaluates `D_t^δ u(x, t)` at decreasing `t_samples` to see whether it tends to 0.
pub fn corollary1_limit_check(subject: LimitSubject<'_>, x: f64, t_samples: &[f64]) -> Result<LimitReport> {
    if t_samples.is_empty() {
        return Err(Error::InvalidInput("need at least one time sample"));
    }
    if t_samples.windows(2).any(|w| !(w[1] < w[0])) || !(t_samples[t_samples.len() - 1] > 0.0) {
        return Err(Error::InvalidInput("time samples must be positive and decreasing"));
    }
    let mut samples = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        let value = match subject {
            LimitSubject::Exact(p) => {
                let failure = Cell::new(None);
                let v = caputo_quadrature(
                    |s| {
                        p.exact_upper_derivative(x, s).unwrap_or_else(|e| {
                            failure.set(Some(e));
                            f64::NAN
                        })
                    },
                    p.delta(),
                    t,
                    LIMIT_QUADRATURE_TOL,
                );
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                v?
            }
            LimitSubject::Manufactured(u, delta) => {
                let d = u.time_derivative(delta.ceiling());
                caputo_quadrature(|s| d.eval(x, s), delta, t, LIMIT_QUADRATURE_TOL)?
            }
        };
        samples.push((t, value));
    }
    let limit_estimate = samples[samples.len() - 1].1;
    Ok(LimitReport { x, samples, limit_estimate, tends_to_zero: limit_estimate.abs() <= LIMIT_ZERO_TOL })
}

/// Least-squares slope of `log value` against `log t`.
///
/// Needs at least four samples with positive `t` and values, spanning at least
/// one decade in `t`.
pub fn estimate_singularity_exponent(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 4 {
        return Err(Error::DegenerateFit("need at least four samples"));
    }
    if samples.iter().any(|&(t, v)| !(t > 0.0 && v > 0.0 && t.is_finite() && v.is_finite())) {
        return Err(Error::DegenerateFit("times and values must be positive and finite"));
    }
    let (lo, hi) = samples.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &(t, _)| (lo.min(t), hi.max(t)));
    if hi / lo < 10.0 {
        return Err(Error::DegenerateFit("time samples span less than one decade"));
    }
    loglog_slope(samples)
}

/// Settings of the numerical layer probe inside [`diagnose`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerProbe {
    /// Time intervals of the probe solve.
    pub intervals: usize,
    /// Grading exponent for `δ < 1`; the `δ > 1` probe must use a uniform mesh.
    pub grading: f64,
    /// Only levels with `window.0 · T ≤ t ≤ window.1 · T` enter the fit.
    ///
    /// Sampled `φ₀` satisfies the discrete steady equation only up to `O(h²)`,
    /// which starts a small discrete layer even for compatible data; the lower
    /// cutoff keeps it out of the fit.
    pub window: (f64, f64),
}

impl Default for LayerProbe {
    fn default() -> Self {
        Self { intervals: 256, grading: 4.0, window: (1e-4, 1e-2) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    /// `max |L₀φ₀ - f(·,0)|` over interior nodes.
    pub incompat_residual: f64,
    /// The residual of the sampled `φ₀` with central differences, and its `h²` floor.
    pub discrete_residual: GridResidual,
    pub assumption1: Assumption1,
    pub sampling_points: usize,
    /// Solution of the steady problem the initial value would have to satisfy.
    pub forced_phi0: Option<Vec<f64>>,
    /// Every datum vanishes once `φ₀` is forced, so a smooth solution is identically 0.
    pub collapse: bool,
    /// Node at which the layer was probed: largest residual times distance to the
    /// boundary, or the midpoint when the residual vanishes.
    pub probe_node: Option<usize>,
    /// `(t, secant derivative)` samples of the probe.
    pub fit_samples: Vec<(f64, f64)>,
    pub fitted_exponent: Option<f64>,
}

const COLLAPSE_TOL: f64 = 1e-12;

/// Runs all diagnostics on `spec`; `probe = None` skips the numerical layer fit.
///
/// The probe solves the problem and fits `|u(x*, t) - φ₀(x*)| / t` (for `δ < 1`) or
/// `|u(x*, t) - φ₀(x*) - t φ₁(x*)| / t²` (for `δ > 1`) against `t` near `t = 0`,
/// which behaves like `t^{δ-1}` or `t^{δ-2}` under an initial layer.
pub fn diagnose(spec: &ProblemSpec, space: &SpaceGrid, probe: Option<LayerProbe>) -> Result<DiagnosticsReport> {
    let op = SteadyOperator::from_spec(spec)?;
    let incompat_residual = theorem_residual(spec, space)?;
    let phi0_samples: Vec<f64> = space.nodes().iter().map(|&x| spec.phi0().eval(x, 0.0)).collect();
    let f0 = spec.f().at_time(0.0);
    let discrete_residual = grid_residual(&op, &f0, &phi0_samples, space)?;
    let assumption1 = assumption1_check(&op);
    let forced_phi0 = match assumption1 {
        Assumption1::Undetermined => None,
        _ => {
            let (a, b) = spec.interval();
            let psi0 = (spec.psi_left().eval(a, 0.0), spec.psi_right().eval(b, 0.0));
            Some(forced_initial_condition(&op, &f0, psi0, space)?)
        }
    };
    let collapse = forced_phi0.as_ref().is_some_and(|w| {
        let (a, b) = spec.interval();
        let horizon = spec.horizon();
        let n = 101;
        let grid = |i: usize, lo: f64, hi: f64| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let vanishes = |e: &Expr, x: f64, t: f64| e.eval(x, t).abs() <= COLLAPSE_TOL;
        w.iter().all(|v| v.abs() <= COLLAPSE_TOL)
            && (0..n).all(|i| {
                let t = grid(i, 0.0, horizon);
                vanishes(spec.psi_left(), a, t)
                    && vanishes(spec.psi_right(), b, t)
                    && (0..n).all(|j| vanishes(spec.f(), grid(j, a, b), t))
            })
            && spec.phi1().is_none_or(|phi1| (0..n).all(|j| vanishes(phi1, grid(j, a, b), 0.0)))
    });

    let mut probe_node = None;
    let mut fit_samples = Vec::new();
    let mut fitted_exponent = None;
    if let Some(probe) = probe {
        let xs = space.nodes();
        let (a, b) = spec.interval();
        // Residual weighted by the distance to the boundary: next to the
        // boundary the layer is masked by the Dirichlet data.
        let node = (1..xs.len() - 1)
            .map(|i| {
                let residual = (op.apply(spec.phi0(), xs[i]) - f0.eval(xs[i], 0.0)).abs();
                (i, residual * (xs[i] - a).min(b - xs[i]))
            })
            .fold((xs.len() / 2, COMPATIBILITY_TOL), |best, c| if c.1 > best.1 { c } else { best })
            .0;
        probe_node = Some(node);
        let delta = spec.delta();
        let grading = if delta.ceiling() == 1 { probe.grading } else { 1.0 };
        let time = TimeGrid::new(spec.horizon(), probe.intervals, grading)?;
        let field = solve(spec, space, &time)?;
        let x = xs[node];
        let u0 = field.value(0, node);
        let v0 = spec.phi1().map_or(0.0, |e| e.eval(x, 0.0));
        let (lo, hi) = (probe.window.0 * spec.horizon(), probe.window.1 * spec.horizon());
        for (n, &t) in time.nodes().iter().enumerate().skip(1) {
            if t > hi {
                break;
            }
            if t < lo {
                continue;
            }
            let change = field.value(n, node) - u0;
            let secant = match delta.ceiling() {
                1 => change / t,
                _ => (change - t * v0) / (t * t),
            };
            fit_samples.push((t, secant.abs()));
        }
        fitted_exponent = estimate_singularity_exponent(&fit_samples).ok();
    }

    Ok(DiagnosticsReport {
        incompat_residual,
        discrete_residual,
        assumption1,
        sampling_points: CONDITION_SAMPLES,
        forced_phi0,
        collapse,
        probe_node,
        fit_samples,
        fitted_exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn order(d: f64) -> FractionalOrder {
        FractionalOrder::new(d).unwrap()
    }

    fn unit_operator(q0: Expr, r0: Expr) -> SteadyOperator {
        SteadyOperator::new(0.0, PI, Expr::one(), q0, r0).unwrap()
    }

    #[test]
    fn assumption_branches() {
        assert_eq!(assumption1_check(&unit_operator(Expr::zero(), Expr::zero())), Assumption1::MaxPrinciple);
        assert_eq!(assumption1_check(&unit_operator(Expr::x(), Expr::one())), Assumption1::MaxPrinciple);
        assert_eq!(
            assumption1_check(&unit_operator(Expr::constant(-4.0) * Expr::x(), Expr::constant(-1.0))),
            Assumption1::EnergyCondition
        );
        assert_eq!(assumption1_check(&unit_operator(Expr::zero(), Expr::constant(-1.0))), Assumption1::Undetermined);
        // energy branch needs p₀ ≡ 1
        let op = SteadyOperator::new(0.0, 1.0, Expr::constant(2.0), Expr::constant(-4.0) * Expr::x(), Expr::constant(-1.0))
            .unwrap();
        assert_eq!(assumption1_check(&op), Assumption1::Undetermined);
        assert!(SteadyOperator::new(0.0, 1.0, Expr::x(), Expr::zero(), Expr::zero()).is_err());
    }

    #[test]
    fn forced_condition_examples() {
        let space = SpaceGrid::new(0.0, PI, 128).unwrap();
        let op = unit_operator(Expr::zero(), Expr::zero());
        let w = forced_initial_condition(&op, &Expr::zero(), (0.0, 0.0), &space).unwrap();
        assert!(w.iter().all(|&v| v == 0.0));

        let w = forced_initial_condition(&op, &Expr::x().sin(), (0.0, 0.0), &space).unwrap();
        let h = space.spacing();
        let err = space.nodes().iter().zip(&w).map(|(&x, v)| (v - libm::sin(x)).abs()).fold(0.0, f64::max);
        assert!(err < h * h, "{err}");

        let w = forced_initial_condition(&op, &Expr::zero(), (0.0, PI), &space).unwrap();
        for (&x, v) in space.nodes().iter().zip(&w) {
            assert!((v - x).abs() < 1e-12);
        }
    }

    #[test]
    fn forced_condition_reports_singular_operator() {
        // two cells: the single interior row is 2/h² + r₀, which vanishes here
        let h = PI / 2.0;
        let op = SteadyOperator::new(0.0, PI, Expr::one(), Expr::zero(), Expr::constant(-2.0 / (h * h))).unwrap();
        let space = SpaceGrid::new(0.0, PI, 2).unwrap();
        assert!(matches!(
            forced_initial_condition(&op, &Expr::one(), (0.0, 0.0), &space),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn residual_examples() {
        let space = SpaceGrid::new(0.0, PI, 256).unwrap();
        let h = space.spacing();
        let sine = ProblemSpec::sine_relaxation(order(0.5), 1.0).unwrap();
        assert!((theorem_residual(&sine, &space).unwrap() - 1.0).abs() <= h * h);
        let zero = ProblemSpec::builder(0.0, PI, 1.0, order(0.5)).build().unwrap();
        assert_eq!(theorem_residual(&zero, &space).unwrap(), 0.0);
        let smooth = ProblemSpec::smooth_manufactured(order(0.5), 1.0).unwrap();
        assert!(theorem_residual(&smooth, &space).unwrap() <= 10.0 * h * h);
    }

    #[test]
    fn forced_values_satisfy_grid_residual() {
        let space = SpaceGrid::new(0.0, 2.0, 64).unwrap();
        let op = SteadyOperator::new(0.0, 2.0, Expr::one() + Expr::x(), Expr::x().cos(), Expr::constant(0.5)).unwrap();
        let f0 = Expr::x().exp();
        let w = forced_initial_condition(&op, &f0, (1.0, -1.0), &space).unwrap();
        let r = grid_residual(&op, &f0, &w, &space).unwrap();
        assert!(r.residual <= 10.0 * r.floor, "{r:?}");
    }

    #[test]
    fn limit_of_caputo_derivative() {
        let ts = [1e-1, 1e-2, 1e-3, 1e-4];
        let exact = ExactProblem::single_mode(order(0.5), 1.0).unwrap();
        let rep = corollary1_limit_check(LimitSubject::Exact(&exact), PI / 2.0, &ts).unwrap();
        assert!(!rep.tends_to_zero);
        assert!((rep.limit_estimate + 1.0).abs() < 0.02, "{rep:?}");
        assert!(rep.samples.windows(2).all(|w| w[1].1 < w[0].1));

        let u = ManufacturedSolution::new((Expr::one() + Expr::t().powf(2.0)) * Expr::x().sin());
        let rep = corollary1_limit_check(LimitSubject::Manufactured(&u, order(0.5)), PI / 2.0, &ts).unwrap();
        assert!(rep.tends_to_zero, "{rep:?}");
        let want = 2.0 * libm::pow(1e-4, 1.5) / crate::specialfn::gamma(2.5).unwrap();
        assert!((rep.limit_estimate - want).abs() < 1e-9);

        let c = ManufacturedSolution::new(Expr::x());
        let rep = corollary1_limit_check(LimitSubject::Manufactured(&c, order(1.3)), 1.0, &ts).unwrap();
        assert!(rep.tends_to_zero && rep.limit_estimate == 0.0);

        assert!(corollary1_limit_check(LimitSubject::Exact(&exact), 1.0, &[1e-3, 1e-2]).is_err());
    }

    #[test]
    fn exponent_estimates() {
        let exact = ExactProblem::single_mode(order(0.4), 1.0).unwrap();
        let ts: Vec<f64> = (0..=12).map(|i| libm::pow(10.0, -6.0 + 0.25 * f64::from(i))).collect();
        let pts: Vec<(f64, f64)> = ts.iter().map(|&t| (t, exact.exact_dt(PI / 2.0, t).unwrap().abs())).collect();
        assert!((estimate_singularity_exponent(&pts).unwrap() + 0.6).abs() < 0.02);
        let smooth: Vec<(f64, f64)> = ts.iter().map(|&t| (t, 2.0 * t)).collect();
        assert!((estimate_singularity_exponent(&smooth).unwrap() - 1.0).abs() < 1e-12);
        assert!(estimate_singularity_exponent(&smooth[..3]).is_err());
        assert!(estimate_singularity_exponent(&smooth[..4]).is_err());
        let mut bad = smooth.clone();
        bad[2].1 = 0.0;
        assert!(estimate_singularity_exponent(&bad).is_err());
    }

    #[test]
    fn diagnose_sine_relaxation() {
        let spec = ProblemSpec::sine_relaxation(order(0.5), 1.0).unwrap();
        let space = SpaceGrid::for_spec(&spec, 64).unwrap();
        let rep = diagnose(&spec, &space, Some(LayerProbe::default())).unwrap();
        assert!(rep.incompat_residual > 0.99);
        assert_eq!(rep.assumption1, Assumption1::MaxPrinciple);
        assert!(rep.forced_phi0.as_ref().unwrap().iter().all(|&v| v == 0.0));
        // zero data force φ₀ ≡ 0, which sin x is not
        assert!(rep.collapse);
        assert_eq!(rep.probe_node, Some(32));
        let e = rep.fitted_exponent.unwrap();
        assert!((e + 0.5).abs() < 0.1, "{e} {:?}", rep.fit_samples);
    }

    #[test]
    fn diagnose_zero_problem_collapses() {
        let spec = ProblemSpec::builder(0.0, PI, 1.0, order(0.5)).build().unwrap();
        let space = SpaceGrid::for_spec(&spec, 64).unwrap();
        let rep = diagnose(&spec, &space, None).unwrap();
        assert!(rep.collapse);
        assert_eq!(rep.incompat_residual, 0.0);
        assert!(rep.fitted_exponent.is_none());
    }

    #[test]
    fn diagnose_smooth_problem_has_no_layer() {
        let spec = ProblemSpec::smooth_manufactured(order(0.5), 1.0).unwrap();
        let space = SpaceGrid::for_spec(&spec, 512).unwrap();
        let rep = diagnose(&spec, &space, Some(LayerProbe::default())).unwrap();
        assert!(rep.incompat_residual < 1e-12);
        assert!(rep.discrete_residual.residual < rep.discrete_residual.floor);
        let e = rep.fitted_exponent.unwrap();
        assert!(e >= -0.05, "{e} {:?}", rep.fit_samples);
    }

    #[test]
    fn diagnose_wave_layer() {
        let spec = ProblemSpec::sine_relaxation(order(1.5), 1.0).unwrap();
        let space = SpaceGrid::for_spec(&spec, 64).unwrap();
        let probe = LayerProbe { intervals: 2048, grading: 1.0, window: (0.0, 5e-2) };
        let rep = diagnose(&spec, &space, Some(probe)).unwrap();
        let e = rep.fitted_exponent.unwrap();
        assert!((e + 0.5).abs() < 0.1, "{e} {:?}", rep.fit_samples);
    }
}
