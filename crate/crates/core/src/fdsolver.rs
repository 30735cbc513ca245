//! Implicit finite differences for `D_t^δ u - p u_xx + q u_x + r u = f` on `(a, b) × (0, T]`.
//!
//! Time is discretized by the L1 operator (`δ < 1`, any [`TimeGrid`]) or the
//! uniform-mesh L2 operator (`δ > 1`), space by second-order central
//! differences. All spatial terms are taken at the new level, so each step is a
//! tridiagonal solve. Dirichlet values are pinned to `ψ`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::caputo::{L1Weights, L2Weights, TimeGrid};
use crate::exactsol::ReferenceSolution;
use crate::expr::{Expr, Var};
use crate::fit::loglog_slope;
use crate::tridiag::solve_tridiagonal;
use crate::{Error, FractionalOrder, Result};

/// Tolerance for the compatibility condition `φ₀ = ψ(·, 0)` at both ends.
pub const COMPATIBILITY_TOL: f64 = 1e-12;

/// Points per direction used when sampling coefficients on the closed rectangle.
pub const ELLIPTICITY_SAMPLES: usize = 101;

/// Data of the initial-boundary value problem.
///
/// `p, q, r, f` are expressions in `x` and `t`; `psi_left`/`psi_right` depend on
/// `t` only; `phi0` and `phi1` on `x` only.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    a: f64,
    b: f64,
    horizon: f64,
    delta: FractionalOrder,
    p: Expr,
    q: Expr,
    r: Expr,
    f: Expr,
    psi_left: Expr,
    psi_right: Expr,
    phi0: Expr,
    phi1: Option<Expr>,
    p_min: f64,
}

/// Builder for [`ProblemSpec`]; unset coefficients default to `p = 1` and zero elsewhere.
#[derive(Debug, Clone)]
pub struct ProblemSpecBuilder {
    a: f64,
    b: f64,
    horizon: f64,
    delta: FractionalOrder,
    p: Expr,
    q: Expr,
    r: Expr,
    f: Expr,
    psi_left: Expr,
    psi_right: Expr,
    phi0: Expr,
    phi1: Option<Expr>,
}

impl ProblemSpecBuilder {
    pub fn p(mut self, p: Expr) -> Self {
        self.p = p;
        self
    }

    pub fn q(mut self, q: Expr) -> Self {
        self.q = q;
        self
    }

    pub fn r(mut self, r: Expr) -> Self {
        self.r = r;
        self
    }

    pub fn f(mut self, f: Expr) -> Self {
        self.f = f;
        self
    }

    pub fn psi(mut self, left: Expr, right: Expr) -> Self {
        self.psi_left = left;
        self.psi_right = right;
        self
    }

    pub fn phi0(mut self, phi0: Expr) -> Self {
        self.phi0 = phi0;
        self
    }

    pub fn phi1(mut self, phi1: Expr) -> Self {
        self.phi1 = Some(phi1);
        self
    }

    /// Checks the variable dependence, ellipticity, compatibility and the
    /// presence of `φ₁` exactly when `δ > 1`.
    pub fn build(self) -> Result<ProblemSpec> {
        if !(self.a.is_finite() && self.b.is_finite() && self.a < self.b) {
            return Err(Error::InvalidInput("interval must satisfy a < b"));
        }
        if !(self.horizon > 0.0) || self.horizon.is_infinite() {
            return Err(Error::Domain { what: "time horizon must be positive", value: self.horizon });
        }
        if !self.psi_left.is_free_of(Var::X) || !self.psi_right.is_free_of(Var::X) {
            return Err(Error::InvalidInput("boundary data may depend on t only"));
        }
        if !self.phi0.is_free_of(Var::T) {
            return Err(Error::InvalidInput("phi0 may depend on x only"));
        }
        match (&self.phi1, self.delta.ceiling()) {
            (Some(phi1), 2) if !phi1.is_free_of(Var::T) => {
                return Err(Error::InvalidInput("phi1 may depend on x only"));
            }
            (Some(_), 2) | (None, 1) => {}
            (None, _) => return Err(Error::InvalidInput("phi1 is required when delta > 1")),
            (Some(_), _) => return Err(Error::InvalidInput("phi1 is only meaningful when delta > 1")),
        }
        let p_min = sample_rectangle(self.a, self.b, self.horizon, ELLIPTICITY_SAMPLES)
            .map(|(x, t)| self.p.eval(x, t))
            .fold(f64::INFINITY, f64::min);
        if !(p_min > 0.0) {
            return Err(Error::NotElliptic { p_min });
        }
        for (x, psi) in [(self.a, &self.psi_left), (self.b, &self.psi_right)] {
            let mismatch = self.phi0.eval(x, 0.0) - psi.eval(x, 0.0);
            if !(mismatch.abs() <= COMPATIBILITY_TOL) {
                return Err(Error::Incompatible { x, mismatch });
            }
        }
        Ok(ProblemSpec {
            a: self.a,
            b: self.b,
            horizon: self.horizon,
            delta: self.delta,
            p: self.p,
            q: self.q,
            r: self.r,
            f: self.f,
            psi_left: self.psi_left,
            psi_right: self.psi_right,
            phi0: self.phi0,
            phi1: self.phi1,
            p_min,
        })
    }
}

fn sample_rectangle(a: f64, b: f64, horizon: f64, n: usize) -> impl Iterator<Item = (f64, f64)> {
    let last = (n - 1) as f64;
    (0..n).flat_map(move |i| {
        let x = a + (b - a) * i as f64 / last;
        (0..n).map(move |j| (x, horizon * j as f64 / last))
    })
}

impl ProblemSpec {
    pub fn builder(a: f64, b: f64, horizon: f64, delta: FractionalOrder) -> ProblemSpecBuilder {
        ProblemSpecBuilder {
            a,
            b,
            horizon,
            delta,
            p: Expr::one(),
            q: Expr::zero(),
            r: Expr::zero(),
            f: Expr::zero(),
            psi_left: Expr::zero(),
            psi_right: Expr::zero(),
            phi0: Expr::zero(),
            phi1: None,
        }
    }

    /// `D_t^δ u - u_xx = 0` on `(0, π)`, `u = 0` on the boundary, `u(x, 0) = sin x`
    /// and `u_t(x, 0) = 0` when `δ > 1`.
    pub fn sine_relaxation(delta: FractionalOrder, horizon: f64) -> Result<Self> {
        let mut b = Self::builder(0.0, PI, horizon, delta).phi0(Expr::x().sin());
        if delta.ceiling() == 2 {
            b = b.phi1(Expr::zero());
        }
        b.build()
    }

    /// Problem whose solution is `u = (1 + t²) sin x`; the source is
    /// `f = 2 t^{2-δ} sin x / Γ(3-δ) + (1 + t²) sin x`.
    pub fn smooth_manufactured(delta: FractionalOrder, horizon: f64) -> Result<Self> {
        let d = delta.value();
        let sin = Expr::x().sin();
        let gamma = crate::specialfn::gamma(3.0 - d)?;
        let caputo = Expr::constant(2.0 / gamma) * Expr::t().powf(2.0 - d) * sin.clone();
        let u = (Expr::one() + Expr::t().powf(2.0)) * sin.clone();
        let mut b = Self::builder(0.0, PI, horizon, delta).f(caputo + u).phi0(sin);
        if delta.ceiling() == 2 {
            b = b.phi1(Expr::zero());
        }
        b.build()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn delta(&self) -> FractionalOrder {
        self.delta
    }

    pub fn p(&self) -> &Expr {
        &self.p
    }

    pub fn q(&self) -> &Expr {
        &self.q
    }

    pub fn r(&self) -> &Expr {
        &self.r
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    pub fn psi_left(&self) -> &Expr {
        &self.psi_left
    }

    pub fn psi_right(&self) -> &Expr {
        &self.psi_right
    }

    pub fn phi0(&self) -> &Expr {
        &self.phi0
    }

    pub fn phi1(&self) -> Option<&Expr> {
        self.phi1.as_ref()
    }

    /// Smallest sampled value of `p` on the closed rectangle.
    pub fn p_min(&self) -> f64 {
        self.p_min
    }

    /// Largest sampled `|q|` on the closed rectangle.
    pub fn q_max(&self) -> f64 {
        sample_rectangle(self.a, self.b, self.horizon, ELLIPTICITY_SAMPLES)
            .map(|(x, t)| self.q.eval(x, t).abs())
            .fold(0.0, f64::max)
    }
}

/// Uniform partition of `[a, b]` into `N` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceGrid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
}

impl SpaceGrid {
    pub fn new(a: f64, b: f64, cells: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput("interval must satisfy a < b"));
        }
        if cells < 2 {
            return Err(Error::InvalidInput("space grid needs at least two cells"));
        }
        let h = (b - a) / cells as f64;
        let mut nodes: Vec<f64> = (0..=cells).map(|i| a + h * i as f64).collect();
        nodes[cells] = b;
        Ok(Self { a, b, nodes })
    }

    pub fn for_spec(spec: &ProblemSpec, cells: usize) -> Result<Self> {
        Self::new(spec.a, spec.b, cells)
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn spacing(&self) -> f64 {
        (self.b - self.a) / self.cells() as f64
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

/// Grid function `u_i^n`, stored level by level.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    space: SpaceGrid,
    time: TimeGrid,
    values: Vec<f64>,
}

impl SolutionField {
    pub fn space(&self) -> &SpaceGrid {
        &self.space
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    /// All values, level `n` occupying `[n (N+1), (n+1)(N+1))`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn level(&self, n: usize) -> &[f64] {
        let w = self.space.nodes.len();
        &self.values[n * w..(n + 1) * w]
    }

    pub fn value(&self, n: usize, i: usize) -> f64 {
        self.level(n)[i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(u_i^n - u_i^{n-1}) / (t_n - t_{n-1})` for `n ≥ 1`.
    pub fn backward_difference(&self, n: usize, i: usize) -> f64 {
        (self.value(n, i) - self.value(n - 1, i)) / self.time.step(n)
    }
}

/// Runs the implicit scheme on the given grids.
pub fn solve(spec: &ProblemSpec, space: &SpaceGrid, time: &TimeGrid) -> Result<SolutionField> {
    run(spec, space, time, None)
}

/// Like [`solve`], but level 0 is taken from `initial` instead of sampling `φ₀`.
///
/// The end values must match `ψ(·, 0)` within [`COMPATIBILITY_TOL`].
pub fn solve_with_initial_values(
    spec: &ProblemSpec,
    space: &SpaceGrid,
    time: &TimeGrid,
    initial: &[f64],
) -> Result<SolutionField> {
    let width = space.nodes().len();
    if initial.len() != width {
        return Err(Error::DimensionMismatch { expected: width, found: initial.len() });
    }
    let (a, b) = space.interval();
    for (x, v, psi) in [(a, initial[0], &spec.psi_left), (b, initial[width - 1], &spec.psi_right)] {
        let mismatch = v - psi.eval(x, 0.0);
        if !(mismatch.abs() <= COMPATIBILITY_TOL) {
            return Err(Error::Incompatible { x, mismatch });
        }
    }
    run(spec, space, time, Some(initial))
}

fn run(spec: &ProblemSpec, space: &SpaceGrid, time: &TimeGrid, initial: Option<&[f64]>) -> Result<SolutionField> {
    let (a, b) = space.interval();
    if (a - spec.a).abs() > 1e-12 * (1.0 + spec.a.abs()) || (b - spec.b).abs() > 1e-12 * (1.0 + spec.b.abs()) {
        return Err(Error::InvalidInput("space grid does not cover the problem interval"));
    }
    if (time.horizon() - spec.horizon).abs() > 1e-12 * spec.horizon {
        return Err(Error::InvalidInput("time grid horizon differs from the problem horizon"));
    }
    let h = space.spacing();
    let peclet = h * spec.q_max() / (2.0 * spec.p_min);
    if peclet >= 1.0 {
        log::warn!("mesh Péclet number {peclet:.3} >= 1; central convection differences may oscillate");
    }

    let xs = space.nodes();
    let width = xs.len();
    let levels = time.nodes().len();
    let mut values = vec![0.0; levels * width];
    match initial {
        Some(row) => values[..width].copy_from_slice(row),
        None => {
            for (v, &x) in values[..width].iter_mut().zip(xs) {
                *v = spec.phi0.eval(x, 0.0);
            }
        }
    }

    let stepper = match spec.delta.ceiling() {
        1 => Stepper::L1(L1Weights::new(time, spec.delta)?),
        _ => {
            let weights = L2Weights::new(time, spec.delta)?;
            let phi1 = spec.phi1.as_ref().ok_or(Error::InvalidInput("phi1 is required when delta > 1"))?;
            let phi1: Vec<f64> = xs.iter().map(|&x| phi1.eval(x, 0.0)).collect();
            Stepper::L2 { weights, phi1, curvature: Vec::with_capacity(levels * width) }
        }
    };
    let mut stepper = stepper;

    let interior = width - 2;
    let inv_h2 = 1.0 / (h * h);
    let inv_2h = 0.5 / h;
    let mut lower = vec![0.0; interior];
    let mut diag = vec![0.0; interior];
    let mut upper = vec![0.0; interior];
    let mut rhs = vec![0.0; interior];
    let mut history = vec![0.0; width];

    for n in 1..levels {
        let t = time.nodes()[n];
        // memory term: discrete Caputo derivative = lead * u^n - history
        let lead = stepper.history(&values, width, n, &mut history);
        let left = spec.psi_left.eval(a, t);
        let right = spec.psi_right.eval(b, t);
        for k in 0..interior {
            let i = k + 1;
            let x = xs[i];
            let p = spec.p.eval(x, t);
            let q = spec.q.eval(x, t);
            let r = spec.r.eval(x, t);
            lower[k] = -p * inv_h2 - q * inv_2h;
            upper[k] = -p * inv_h2 + q * inv_2h;
            diag[k] = lead + 2.0 * p * inv_h2 + r;
            rhs[k] = spec.f.eval(x, t) + history[i];
        }
        rhs[0] -= lower[0] * left;
        rhs[interior - 1] -= upper[interior - 1] * right;
        let sol = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        let row = &mut values[n * width..(n + 1) * width];
        row[0] = left;
        row[width - 1] = right;
        row[1..width - 1].copy_from_slice(&sol);
        stepper.record(&values, width, n);
    }
    Ok(SolutionField { space: space.clone(), time: time.clone(), values })
}

enum Stepper<'a> {
    L1(L1Weights<'a>),
    L2 { weights: L2Weights, phi1: Vec<f64>, curvature: Vec<f64> },
}

impl Stepper<'_> {
    /// Fills `history` so that the discrete derivative at level `n` equals
    /// `lead * u^n - history`, and returns `lead`.
    fn history(&self, values: &[f64], width: usize, n: usize, history: &mut [f64]) -> f64 {
        match self {
            Stepper::L1(w) => {
                let lead = w.weight(n, n);
                for (hst, &prev) in history.iter_mut().zip(&values[(n - 1) * width..n * width]) {
                    *hst = lead * prev;
                }
                for j in 1..n {
                    let wj = w.weight(n, j);
                    let (older, newer) = values[(j - 1) * width..(j + 1) * width].split_at(width);
                    for ((hst, &u1), &u0) in history.iter_mut().zip(newer).zip(older) {
                        *hst -= wj * (u1 - u0);
                    }
                }
                lead
            }
            Stepper::L2 { weights, phi1, curvature } => {
                let tau = weights.step();
                let kappa = weights.scale();
                let inv_tau2 = 1.0 / (tau * tau);
                if n == 1 {
                    for ((hst, &u0), &v0) in history.iter_mut().zip(&values[..width]).zip(phi1) {
                        *hst = 2.0 * kappa * (u0 + tau * v0) * inv_tau2;
                    }
                    return 2.0 * kappa * inv_tau2;
                }
                let b0 = weights.b(0);
                let (older, prev) = values[(n - 2) * width..n * width].split_at(width);
                for ((hst, &um1), &um2) in history.iter_mut().zip(prev).zip(older) {
                    *hst = -kappa * b0 * (um2 - 2.0 * um1) * inv_tau2;
                }
                for j in 1..n {
                    let bj = kappa * weights.b(n - j);
                    for (hst, &c) in history.iter_mut().zip(&curvature[(j - 1) * width..j * width]) {
                        *hst -= bj * c;
                    }
                }
                kappa * b0 * inv_tau2
            }
        }
    }

    fn record(&mut self, values: &[f64], width: usize, n: usize) {
        if let Stepper::L2 { weights, phi1, curvature } = self {
            for i in 0..width {
                let column = |m: usize| values[m * width + i];
                let c = if n == 1 {
                    weights.curvature(&[column(0), column(1)], 1, phi1[i])
                } else {
                    weights.curvature(&[column(n - 2), column(n - 1), column(n)], 2, 0.0)
                };
                curvature.push(c);
            }
        }
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceEntry {
    pub intervals: usize,
    /// `T / M`, the abscissa of the order fit.
    pub dt: f64,
    /// Max-norm error over all space-time nodes.
    pub max_error: f64,
    /// Max-norm error on the last level `t = T`.
    pub error_at_horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    Exact,
    FineMesh { intervals: usize, cells: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub grading: f64,
    pub cells: usize,
    pub reference: ReferenceKind,
    pub entries: Vec<ConvergenceEntry>,
    /// Least-squares slope of `log max_error` against `log dt`.
    pub order: f64,
    /// The same fit for the error at `t = T`.
    pub order_at_horizon: f64,
}

/// Time refinement factor of the fine-mesh reference.
pub const REFERENCE_TIME_FACTOR: usize = 4;
/// Space refinement factor of the fine-mesh reference.
pub const REFERENCE_SPACE_FACTOR: usize = 2;

/// Solves on meshes with `M` from `m_list` and fits the empirical temporal order.
///
/// Errors are measured against `reference` at every grid node, or, without one,
/// against a solution on `4 max M` intervals and `2 N` cells (every `M` must then
/// divide `4 max M`).
pub fn convergence_study(
    spec: &ProblemSpec,
    space: &SpaceGrid,
    m_list: &[usize],
    grading: f64,
    reference: Option<&dyn ReferenceSolution>,
) -> Result<ConvergenceReport> {
    if m_list.len() < 3 {
        return Err(Error::InvalidInput("convergence study needs at least three meshes"));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("mesh sizes must be strictly increasing"));
    }
    let m_max = m_list[m_list.len() - 1];
    let fine = match reference {
        Some(_) => None,
        None => {
            let m_fine = REFERENCE_TIME_FACTOR * m_max;
            if m_list.iter().any(|&m| !m_fine.is_multiple_of(m)) {
                return Err(Error::InvalidInput("every mesh size must divide the reference mesh size"));
            }
            let (a, b) = space.interval();
            let fine_space = SpaceGrid::new(a, b, REFERENCE_SPACE_FACTOR * space.cells())?;
            let fine_time = TimeGrid::new(spec.horizon, m_fine, grading)?;
            Some(solve(spec, &fine_space, &fine_time)?)
        }
    };

    let mut entries = Vec::with_capacity(m_list.len());
    let mut row = vec![0.0; space.nodes().len()];
    for &m in m_list {
        let time = TimeGrid::new(spec.horizon, m, grading)?;
        let field = solve(spec, space, &time)?;
        let mut max_error: f64 = 0.0;
        let mut error_at_horizon = 0.0;
        for (n, &t) in time.nodes().iter().enumerate() {
            match (&reference, &fine) {
                (Some(r), _) => r.level(t, space.nodes(), &mut row)?,
                (None, Some(f)) => {
                    let stride = f.time().intervals() / m;
                    for (i, v) in row.iter_mut().enumerate() {
                        *v = f.value(n * stride, REFERENCE_SPACE_FACTOR * i);
                    }
                }
                (None, None) => unreachable!(),
            }
            let err = field.level(n).iter().zip(&row).fold(0.0_f64, |e, (u, v)| e.max((u - v).abs()));
            max_error = max_error.max(err);
            if n == m {
                error_at_horizon = err;
            }
        }
        entries.push(ConvergenceEntry { intervals: m, dt: spec.horizon / m as f64, max_error, error_at_horizon });
    }
    let fit = |sel: fn(&ConvergenceEntry) -> f64| {
        let pts: Vec<(f64, f64)> = entries.iter().map(|e| (e.dt, sel(e))).collect();
        loglog_slope(&pts)
    };
    let order = fit(|e| e.max_error)?;
    let order_at_horizon = fit(|e| e.error_at_horizon)?;
    Ok(ConvergenceReport {
        grading,
        cells: space.cells(),
        reference: match fine {
            Some(f) => ReferenceKind::FineMesh { intervals: f.time().intervals(), cells: f.space().cells() },
            None => ReferenceKind::Exact,
        },
        entries,
        order,
        order_at_horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactsol::{ExactProblem, ManufacturedSolution};

    fn order(d: f64) -> FractionalOrder {
        FractionalOrder::new(d).unwrap()
    }

    fn max_error_at_horizon(spec: &ProblemSpec, exact: &ExactProblem, cells: usize, m: usize) -> f64 {
        let space = SpaceGrid::for_spec(spec, cells).unwrap();
        let time = TimeGrid::uniform(spec.horizon(), m).unwrap();
        let field = solve(spec, &space, &time).unwrap();
        space
            .nodes()
            .iter()
            .zip(field.level(m))
            .map(|(&x, u)| (u - exact.exact_value(x, spec.horizon()).unwrap()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn builder_validation() {
        let d = order(0.5);
        assert!(matches!(
            ProblemSpec::builder(0.0, 1.0, 1.0, d).p(Expr::x() - Expr::constant(0.5)).build(),
            Err(Error::NotElliptic { .. })
        ));
        assert!(matches!(
            ProblemSpec::builder(0.0, 1.0, 1.0, d).phi0(Expr::one()).build(),
            Err(Error::Incompatible { x, .. }) if x == 0.0
        ));
        assert!(ProblemSpec::builder(0.0, 1.0, 1.0, d).phi1(Expr::zero()).build().is_err());
        assert!(ProblemSpec::builder(0.0, 1.0, 1.0, order(1.5)).build().is_err());
        assert!(ProblemSpec::builder(0.0, 1.0, 1.0, d).phi0(Expr::t()).build().is_err());
        assert!(ProblemSpec::builder(0.0, 1.0, 1.0, d).psi(Expr::x(), Expr::zero()).build().is_err());
        assert!(ProblemSpec::builder(1.0, 1.0, 1.0, d).build().is_err());
        let s = ProblemSpec::builder(0.0, 1.0, 2.0, d).p(Expr::constant(2.0) + Expr::t()).build().unwrap();
        assert_eq!(s.p_min(), 2.0);
    }

    #[test]
    fn zero_data_give_zero_field() {
        for d in [0.4, 1.6] {
            let mut b = ProblemSpec::builder(0.0, 1.0, 1.0, order(d)).q(Expr::constant(0.5)).r(Expr::x());
            if d > 1.0 {
                b = b.phi1(Expr::zero());
            }
            let spec = b.build().unwrap();
            let space = SpaceGrid::new(0.0, 1.0, 16).unwrap();
            let time = TimeGrid::uniform(1.0, 32).unwrap();
            assert_eq!(solve(&spec, &space, &time).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn pinned_rows_reproduce_data() {
        let spec = ProblemSpec::builder(0.0, 1.0, 1.0, order(0.6))
            .psi(Expr::t(), Expr::one() + Expr::t().powf(2.0))
            .phi0(Expr::x())
            .f(Expr::x() * Expr::t())
            .build()
            .unwrap();
        let space = SpaceGrid::new(0.0, 1.0, 10).unwrap();
        let time = TimeGrid::new(1.0, 20, 2.0).unwrap();
        let field = solve(&spec, &space, &time).unwrap();
        for (i, &x) in space.nodes().iter().enumerate() {
            assert_eq!(field.value(0, i), x);
        }
        for (n, &t) in time.nodes().iter().enumerate() {
            assert_eq!(field.value(n, 0), t);
            assert_eq!(field.value(n, 10), 1.0 + libm::pow(t, 2.0));
        }
    }

    #[test]
    fn sine_relaxation_error_decreases() {
        // error at t = 1 against E_δ(-t^δ) sin x
        for d in [0.5, 1.5] {
            let spec = ProblemSpec::sine_relaxation(order(d), 1.0).unwrap();
            let exact = ExactProblem::single_mode(order(d), 1.0).unwrap();
            let errs: Vec<f64> = [32, 64, 128].iter().map(|&m| max_error_at_horizon(&spec, &exact, 64, m)).collect();
            assert!(errs[0] > errs[1] && errs[1] > errs[2], "δ = {d}: {errs:?}");
            if d < 1.0 {
                assert!(errs[2] < 2e-2, "{errs:?}");
            }
        }
    }

    #[test]
    fn l1_step_matches_hand_computation() {
        // one step, three cells: u^1 solves (w + 2/h²) u_1 - u_2/h² = w u^0_1, symmetric
        let d = order(0.5);
        let spec = ProblemSpec::builder(0.0, 3.0, 1.0, d).phi0(Expr::one() - (Expr::x() - Expr::constant(1.5)).powf(2.0) / Expr::constant(2.25)).build().unwrap();
        let space = SpaceGrid::new(0.0, 3.0, 3).unwrap();
        let time = TimeGrid::uniform(1.0, 1).unwrap();
        let field = solve(&spec, &space, &time).unwrap();
        let w = 1.0 / crate::specialfn::gamma(1.5).unwrap();
        let u0 = 1.0 - 0.25 / 2.25;
        // symmetric interior: (w + 2) u - u = w u0
        let want = w * u0 / (w + 1.0);
        assert!((field.value(1, 1) - want).abs() < 1e-15);
        assert!((field.value(1, 2) - want).abs() < 1e-15);
    }

    #[test]
    fn smooth_problem_converges_at_full_order() {
        let d = order(0.5);
        let spec = ProblemSpec::smooth_manufactured(d, 1.0).unwrap();
        let u = ManufacturedSolution::new((Expr::one() + Expr::t().powf(2.0)) * Expr::x().sin());
        let space = SpaceGrid::for_spec(&spec, 256).unwrap();
        let report = convergence_study(&spec, &space, &[8, 16, 32, 64], 1.0, Some(&u)).unwrap();
        assert!(report.order > 2.0 - 0.5 - 0.1, "{report:?}");
        assert_eq!(report.reference, ReferenceKind::Exact);
    }

    #[test]
    fn spatial_order_is_two() {
        let d = order(0.5);
        let spec = ProblemSpec::smooth_manufactured(d, 1.0).unwrap();
        let u = ManufacturedSolution::new((Expr::one() + Expr::t().powf(2.0)) * Expr::x().sin());
        let mut pts = Vec::new();
        // time error ~ τ^{1.5} stays well below the spatial error
        let time = TimeGrid::uniform(1.0, 2048).unwrap();
        for n in [8usize, 16, 32] {
            let space = SpaceGrid::for_spec(&spec, n).unwrap();
            let field = solve(&spec, &space, &time).unwrap();
            let mut row = vec![0.0; n + 1];
            u.level(1.0, space.nodes(), &mut row).unwrap();
            let err = field.level(2048).iter().zip(&row).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            pts.push((space.spacing(), err));
        }
        let slope = loglog_slope(&pts).unwrap();
        assert!(slope > 1.9, "{slope} {pts:?}");
    }

    #[test]
    fn discrete_maximum_principle() {
        let spec = ProblemSpec::builder(0.0, 1.0, 1.0, order(0.3))
            .r(Expr::constant(2.0))
            .q(Expr::x())
            .f(-(Expr::x() * Expr::t()).sin().powf(2.0))
            .psi(-Expr::t(), Expr::zero())
            .phi0(-(Expr::constant(PI) * Expr::x()).sin())
            .build()
            .unwrap();
        let space = SpaceGrid::new(0.0, 1.0, 40).unwrap();
        let time = TimeGrid::new(1.0, 50, 2.0).unwrap();
        let field = solve(&spec, &space, &time).unwrap();
        assert!(field.values().iter().all(|&v| v <= 1e-14));
    }

    #[test]
    fn fine_mesh_reference_study() {
        let d = order(0.5);
        let spec = ProblemSpec::smooth_manufactured(d, 1.0).unwrap();
        let space = SpaceGrid::for_spec(&spec, 16).unwrap();
        let report = convergence_study(&spec, &space, &[4, 8, 16], 1.0, None).unwrap();
        assert_eq!(report.reference, ReferenceKind::FineMesh { intervals: 64, cells: 32 });
        assert!(report.entries.windows(2).all(|w| w[1].max_error < w[0].max_error));
        assert!(convergence_study(&spec, &space, &[4, 8], 1.0, None).is_err());
        assert!(convergence_study(&spec, &space, &[4, 8, 8], 1.0, None).is_err());
        assert!(convergence_study(&spec, &space, &[4, 6, 7], 1.0, None).is_err());
    }

    #[test]
    fn initial_values_from_a_grid() {
        let spec = ProblemSpec::sine_relaxation(order(0.5), 1.0).unwrap();
        let space = SpaceGrid::for_spec(&spec, 16).unwrap();
        let time = TimeGrid::uniform(1.0, 8).unwrap();
        let row: Vec<f64> = space.nodes().iter().map(|&x| libm::sin(x)).collect();
        assert_eq!(solve_with_initial_values(&spec, &space, &time, &row).unwrap(), solve(&spec, &space, &time).unwrap());
        let mut bad = row.clone();
        bad[0] = 1.0;
        assert!(matches!(solve_with_initial_values(&spec, &space, &time, &bad), Err(Error::Incompatible { .. })));
        assert!(solve_with_initial_values(&spec, &space, &time, &row[1..]).is_err());
    }

    #[test]
    fn grid_mismatch_and_nonuniform_l2() {
        let spec = ProblemSpec::sine_relaxation(order(1.5), 1.0).unwrap();
        let space = SpaceGrid::for_spec(&spec, 8).unwrap();
        assert!(matches!(
            solve(&spec, &space, &TimeGrid::new(1.0, 8, 2.0).unwrap()),
            Err(Error::NonUniformGrid)
        ));
        assert!(solve(&spec, &SpaceGrid::new(0.0, 3.0, 8).unwrap(), &TimeGrid::uniform(1.0, 8).unwrap()).is_err());
        assert!(solve(&spec, &space, &TimeGrid::uniform(2.0, 8).unwrap()).is_err());
    }
}
