//! The Caputo derivative
//!
//! `D_t^δ g(t) = 1/Γ(δ̄-δ) ∫_0^t (t-s)^{δ̄-δ-1} g^{(δ̄)}(s) ds`
//!
//! evaluated two ways: by quadrature of the defining integral, which serves as
//! the reference, and by the discrete L1 (`δ < 1`) and L2 (`δ > 1`) operators on
//! a time mesh, which the finite-difference solver builds on.

use alloc::vec;
use alloc::vec::Vec;

use crate::fit::loglog_slope;
use crate::gauss::PanelRule;
use crate::specialfn::{gamma, gamma_unchecked};
use crate::{Error, FractionalOrder, Result};

/// Mesh `0 = t_0 < t_1 < ... < t_M = T` with `t_j = T (j/M)^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    grading: f64,
    nodes: Vec<f64>,
}

impl TimeGrid {
    pub fn new(horizon: f64, intervals: usize, grading: f64) -> Result<Self> {
        if !(horizon > 0.0) || horizon.is_infinite() {
            return Err(Error::Domain { what: "time horizon must be positive", value: horizon });
        }
        if intervals == 0 {
            return Err(Error::InvalidInput("time grid needs at least one interval"));
        }
        if !(grading >= 1.0) || grading.is_infinite() {
            return Err(Error::Domain { what: "grading exponent must be at least 1", value: grading });
        }
        let m = intervals as f64;
        let mut nodes: Vec<f64> = (0..=intervals)
            .map(|j| {
                let s = j as f64 / m;
                if grading == 1.0 {
                    horizon * s
                } else {
                    horizon * libm::pow(s, grading)
                }
            })
            .collect();
        nodes[intervals] = horizon;
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("grading produced non-increasing nodes"));
        }
        Ok(Self { horizon, grading, nodes })
    }

    pub fn uniform(horizon: f64, intervals: usize) -> Result<Self> {
        Self::new(horizon, intervals, 1.0)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// Number of intervals `M`.
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn is_uniform(&self) -> bool {
        self.grading == 1.0
    }

    /// `t_j - t_{j-1}` for `j ≥ 1`.
    pub fn step(&self, j: usize) -> f64 {
        self.nodes[j] - self.nodes[j - 1]
    }
}

/// Values of a function at the nodes of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.nodes().len() {
            return Err(Error::DimensionMismatch { expected: grid.nodes().len(), found: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: TimeGrid, g: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| g(t)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// `D_t^δ g(t)` by quadrature, given the `δ̄`-th classical derivative of `g`.
///
/// `[0, t/2]` is integrated with dyadic panels toward `s = 0`, where `g^{(δ̄)}` may
/// have an integrable singularity. On `[t/2, t]` the substitution
/// `s = t - u^{1/(δ̄-δ)}` absorbs the kernel singularity, leaving a bounded
/// integrand that is again integrated with dyadic panels toward `u = 0`.
///
/// A non-finite derivative value is reported as a quadrature failure.
pub fn caputo_quadrature(
    dg_upper: impl Fn(f64) -> f64,
    delta: FractionalOrder,
    t: f64,
    tol: f64,
) -> Result<f64> {
    if !(t > 0.0) || t.is_infinite() {
        return Err(Error::Domain { what: "Caputo quadrature needs t > 0", value: t });
    }
    if !(tol > 0.0) {
        return Err(Error::Domain { what: "quadrature tolerance must be positive", value: tol });
    }
    let beta = delta.kernel_exponent();
    let gamma_beta = gamma(beta)?;
    let raw_tol = tol * gamma_beta;
    let rule = PanelRule::new();
    let half = 0.5 * t;

    let left = rule.toward_zero(
        &mut |s| libm::pow(t - s, beta - 1.0) * dg_upper(s),
        half,
        0.5 * raw_tol,
    )?;
    let inv_beta = 1.0 / beta;
    let right = rule.toward_zero(
        &mut |u| dg_upper(t - libm::pow(u, inv_beta)),
        libm::pow(half, beta),
        0.5 * raw_tol * beta,
    )? / beta;
    Ok((left + right) / gamma_beta)
}

/// L1 weights `w_{n,j} = [(t_n - t_{j-1})^{1-δ} - (t_n - t_j)^{1-δ}] / (Γ(2-δ) (t_j - t_{j-1}))`.
#[derive(Debug, Clone, Copy)]
pub struct L1Weights<'a> {
    nodes: &'a [f64],
    exponent: f64,
    inv_gamma: f64,
}

impl<'a> L1Weights<'a> {
    pub fn new(grid: &'a TimeGrid, delta: FractionalOrder) -> Result<Self> {
        if delta.ceiling() != 1 {
            return Err(Error::OrderMismatch { expected: 1, delta: delta.value() });
        }
        let exponent = 1.0 - delta.value();
        Ok(Self { nodes: grid.nodes(), exponent, inv_gamma: 1.0 / gamma_unchecked(1.0 + exponent) })
    }

    /// `w_{n,j}` for `1 ≤ j ≤ n`.
    #[inline]
    pub fn weight(&self, n: usize, j: usize) -> f64 {
        let tn = self.nodes[n];
        let (a, b) = (self.nodes[j - 1], self.nodes[j]);
        let far = libm::pow(tn - a, self.exponent);
        let near = if j == n { 0.0 } else { libm::pow(tn - b, self.exponent) };
        (far - near) * self.inv_gamma / (b - a)
    }
}

/// Discrete Caputo derivative for `δ ∈ (0,1)`:
/// `D^δ f(t_n) ≈ Σ_{j=1}^n w_{n,j} (f_j - f_{j-1})`, with value 0 at `t_0`.
pub fn l1_operator(f: &SampledFunction, delta: FractionalOrder) -> Result<SampledFunction> {
    let weights = L1Weights::new(f.grid(), delta)?;
    let v = f.values();
    let m = f.grid().intervals();
    let mut out = vec![0.0; m + 1];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        *slot = (1..=n).map(|j| weights.weight(n, j) * (v[j] - v[j - 1])).sum();
    }
    SampledFunction::new(f.grid().clone(), out)
}

/// Weights of the uniform-mesh L2 operator for `δ ∈ (1,2)`.
///
/// With `β = 2 - δ` and step `τ`, `D^δ f(t_n) ≈ κ Σ_{j=1}^n b_{n-j} c_j`, where
/// `κ = τ^β / Γ(β+1)`, `b_m = (m+1)^β - m^β`, and `c_j` approximates `f''` on
/// `(t_{j-1}, t_j)` by the second difference centred at `t_{j-1}`. For `j = 1`
/// the ghost value `f_{-1} = f_1 - 2τ φ₁` brings in the initial velocity.
#[derive(Debug, Clone, Copy)]
pub struct L2Weights {
    beta: f64,
    step: f64,
    scale: f64,
}

impl L2Weights {
    pub fn new(grid: &TimeGrid, delta: FractionalOrder) -> Result<Self> {
        if delta.ceiling() != 2 {
            return Err(Error::OrderMismatch { expected: 2, delta: delta.value() });
        }
        if !grid.is_uniform() {
            return Err(Error::NonUniformGrid);
        }
        let beta = delta.kernel_exponent();
        let step = grid.step(1);
        Ok(Self { beta, step, scale: libm::pow(step, beta) / gamma_unchecked(beta + 1.0) })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// `κ = τ^β / Γ(β+1)`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `b_m = (m+1)^β - m^β`.
    #[inline]
    pub fn b(&self, m: usize) -> f64 {
        let mf = m as f64;
        libm::pow(mf + 1.0, self.beta) - if m == 0 { 0.0 } else { libm::pow(mf, self.beta) }
    }

    /// `c_j` from the samples; `values[..=j]` must be available.
    #[inline]
    pub fn curvature(&self, values: &[f64], j: usize, phi1: f64) -> f64 {
        let tau = self.step;
        if j == 1 {
            2.0 * (values[1] - values[0] - tau * phi1) / (tau * tau)
        } else {
            (values[j] - 2.0 * values[j - 1] + values[j - 2]) / (tau * tau)
        }
    }
}

/// Discrete Caputo derivative for `δ ∈ (1,2)` on a uniform mesh; `phi1 = f'(0)`.
pub fn l2_operator(f: &SampledFunction, delta: FractionalOrder, phi1: f64) -> Result<SampledFunction> {
    let weights = L2Weights::new(f.grid(), delta)?;
    let v = f.values();
    let m = f.grid().intervals();
    let curv: Vec<f64> = (1..=m).map(|j| weights.curvature(v, j, phi1)).collect();
    let b: Vec<f64> = (0..m).map(|k| weights.b(k)).collect();
    let mut out = vec![0.0; m + 1];
    for (n, slot) in out.iter_mut().enumerate().skip(1) {
        let s: f64 = (1..=n).map(|j| b[n - j] * curv[j - 1]).sum();
        *slot = weights.scale() * s;
    }
    SampledFunction::new(f.grid().clone(), out)
}

/// Closed catalog of test functions with analytically known derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// `t²`
    Square,
    /// `t³`
    Cube,
    /// `sin t`
    Sine,
    /// `eᵗ - 1 - t`
    ExpMinusLinear,
    /// `eᵗ`
    Exp,
    /// `t^δ`, whose `δ̄`-th derivative blows up at 0.
    PowerDelta,
}

impl TestFunction {
    pub const ALL: [TestFunction; 6] = [
        TestFunction::Square,
        TestFunction::Cube,
        TestFunction::Sine,
        TestFunction::ExpMinusLinear,
        TestFunction::Exp,
        TestFunction::PowerDelta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunction::Square => "t2",
            TestFunction::Cube => "t3",
            TestFunction::Sine => "sin",
            TestFunction::ExpMinusLinear => "expm1t",
            TestFunction::Exp => "exp",
            TestFunction::PowerDelta => "tdelta",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|g| g.name() == name)
    }

    pub fn value(self, t: f64, delta: FractionalOrder) -> f64 {
        match self {
            TestFunction::Square => t * t,
            TestFunction::Cube => t * t * t,
            TestFunction::Sine => libm::sin(t),
            TestFunction::ExpMinusLinear => libm::expm1(t) - t,
            TestFunction::Exp => libm::exp(t),
            TestFunction::PowerDelta => libm::pow(t, delta.value()),
        }
    }

    /// `g^{(order)}(t)` for `order ∈ {1, 2}`.
    pub fn derivative(self, order: u32, t: f64, delta: FractionalOrder) -> f64 {
        match (self, order) {
            (TestFunction::Square, 1) => 2.0 * t,
            (TestFunction::Square, _) => 2.0,
            (TestFunction::Cube, 1) => 3.0 * t * t,
            (TestFunction::Cube, _) => 6.0 * t,
            (TestFunction::Sine, 1) => libm::cos(t),
            (TestFunction::Sine, _) => -libm::sin(t),
            (TestFunction::ExpMinusLinear, 1) => libm::expm1(t),
            (TestFunction::ExpMinusLinear, _) => libm::exp(t),
            (TestFunction::Exp, _) => libm::exp(t),
            (TestFunction::PowerDelta, 1) => {
                let d = delta.value();
                d * libm::pow(t, d - 1.0)
            }
            (TestFunction::PowerDelta, _) => {
                let d = delta.value();
                d * (d - 1.0) * libm::pow(t, d - 2.0)
            }
        }
    }

    /// `C = max_{[0,T]} |g^{(order)}|`, or `None` when the derivative is unbounded.
    pub fn derivative_bound(self, order: u32, horizon: f64) -> Option<f64> {
        Some(match (self, order) {
            (TestFunction::Square, 1) => 2.0 * horizon,
            (TestFunction::Square, _) => 2.0,
            (TestFunction::Cube, 1) => 3.0 * horizon * horizon,
            (TestFunction::Cube, _) => 6.0 * horizon,
            (TestFunction::Sine, _) => 1.0,
            (TestFunction::ExpMinusLinear, 1) => libm::expm1(horizon),
            (TestFunction::ExpMinusLinear, _) => libm::exp(horizon),
            (TestFunction::Exp, _) => libm::exp(horizon),
            (TestFunction::PowerDelta, _) => return None,
        })
    }

    /// Order of the zero of `g^{(order)}` at `t = 0`; `None` for the singular case.
    ///
    /// `D^δ g(t)` then behaves like `t^{δ̄-δ+ν}` as `t → 0⁺`.
    pub fn vanishing_order(self, order: u32) -> Option<u32> {
        Some(match (self, order) {
            (TestFunction::Square, 1) => 1,
            (TestFunction::Square, _) => 0,
            (TestFunction::Cube, 1) => 2,
            (TestFunction::Cube, _) => 1,
            (TestFunction::Sine, 1) => 0,
            (TestFunction::Sine, _) => 1,
            (TestFunction::ExpMinusLinear, 1) => 1,
            (TestFunction::ExpMinusLinear, _) => 0,
            (TestFunction::Exp, _) => 0,
            (TestFunction::PowerDelta, _) => return None,
        })
    }

    /// Closed form of `D^δ g(t)` where one exists (power functions).
    pub fn analytic_caputo(self, delta: FractionalOrder, t: f64) -> Option<f64> {
        let d = delta.value();
        let power = match self {
            TestFunction::Square => 2.0,
            TestFunction::Cube => 3.0,
            TestFunction::PowerDelta => d,
            _ => return None,
        };
        Some(power_rule(power, d, t))
    }
}

/// `D^δ t^p = Γ(p+1)/Γ(p+1-δ) t^{p-δ}`.
pub fn power_rule(power: f64, delta: f64, t: f64) -> f64 {
    gamma_unchecked(power + 1.0) / gamma_unchecked(power + 1.0 - delta) * libm::pow(t, power - delta)
}

/// One sample of the Lemma check: `|D^δ g(t)|` next to `C t^{δ̄-δ} / Γ(δ̄-δ+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Sample {
    pub t: f64,
    pub magnitude: f64,
    pub bound: Option<f64>,
    /// Absolute tolerance the quadrature was run with.
    pub tolerance: f64,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma1Report {
    pub function: TestFunction,
    pub delta: FractionalOrder,
    pub bound_constant: Option<f64>,
    pub samples: Vec<Lemma1Sample>,
    /// Slope of `ln |D^δ g|` against `ln t`, when every magnitude is positive.
    pub fitted_exponent: Option<f64>,
}

impl Lemma1Report {
    pub fn any_violation(&self) -> bool {
        self.samples.iter().any(|s| s.violated)
    }

    /// Largest `|D^δ g(t)| - bound(t)` over the samples (negative when the bound holds).
    pub fn max_excess(&self) -> Option<f64> {
        self.samples
            .iter()
            .filter_map(|s| s.bound.map(|b| s.magnitude - b))
            .fold(None, |acc, e| Some(acc.map_or(e, |a: f64| a.max(e))))
    }

    /// Decay exponent `δ̄ - δ + ν` predicted from the vanishing order `ν` of `g^{(δ̄)}` at 0.
    pub fn expected_exponent(&self) -> Option<f64> {
        self.function
            .vanishing_order(self.delta.ceiling())
            .map(|nu| self.delta.kernel_exponent() + f64::from(nu))
    }
}

const LEMMA_REL_TOL: f64 = 1e-9;

/// `D^δ g(t)` to roughly `rel_tol` relative accuracy, starting from `abs_tol`.
fn caputo_relative(
    dg_upper: impl Fn(f64) -> f64,
    delta: FractionalOrder,
    t: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(f64, f64)> {
    let mut tol = abs_tol;
    let mut v = caputo_quadrature(&dg_upper, delta, t, tol)?;
    for _ in 0..4 {
        let want = rel_tol * v.abs();
        if want >= tol || want == 0.0 {
            break;
        }
        tol = want.max(1e-300);
        v = caputo_quadrature(&dg_upper, delta, t, tol)?;
    }
    Ok((v, tol))
}

/// Checks `|D^δ g(t)| ≤ C t^{δ̄-δ} / Γ(δ̄-δ+1)` for a catalog function at each sample.
pub fn lemma1_bound_check(
    g: TestFunction,
    delta: FractionalOrder,
    horizon: f64,
    t_samples: &[f64],
) -> Result<Lemma1Report> {
    let order = delta.ceiling();
    let beta = delta.kernel_exponent();
    let bound_constant = g.derivative_bound(order, horizon);
    let denom = gamma(beta + 1.0)?;
    let mut samples = Vec::with_capacity(t_samples.len());
    for &t in t_samples {
        if !(t > 0.0 && t <= horizon) {
            return Err(Error::Domain { what: "Lemma samples must lie in (0, T]", value: t });
        }
        let bound = bound_constant.map(|c| c * libm::pow(t, beta) / denom);
        let start_tol = LEMMA_REL_TOL * bound.unwrap_or(1.0).max(1e-300);
        let (value, tolerance) = caputo_relative(
            |s| g.derivative(order, s, delta),
            delta,
            t,
            start_tol,
            LEMMA_REL_TOL,
        )?;
        let magnitude = value.abs();
        let violated = bound.is_some_and(|b| magnitude > b + tolerance);
        samples.push(Lemma1Sample { t, magnitude, bound, tolerance, violated });
    }
    let fitted_exponent = if samples.len() >= 2 && samples.iter().all(|s| s.magnitude > 0.0) {
        let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.t, s.magnitude)).collect();
        Some(loglog_slope(&pts)?)
    } else {
        None
    };
    Ok(Lemma1Report { function: g, delta, bound_constant, samples, fitted_exponent })
}
