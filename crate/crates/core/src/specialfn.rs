//! Gamma, the one-parameter Mittag-Leffler function, and the time derivatives of
//! `t ↦ E_δ(-λ t^δ)`.
//!
//! All series are summed in `f64` until a rigorous tail bound drops below the
//! configured absolute tolerance. For every series here the ratio of consecutive
//! term magnitudes is non-increasing in `k` (a consequence of the log-convexity
//! of Γ), so once that ratio `ρ` is below one the remaining tail after a term of
//! size `|a_k|` is bounded by `|a_k| ρ / (1 - ρ)`.

use crate::{Error, Result};

/// Order `δ ∈ (0,1) ∪ (1,2)` of a Caputo derivative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 2.0) || delta == 1.0 {
            return Err(Error::Domain {
                what: "fractional order must lie in (0,1) or (1,2)",
                value: delta,
            });
        }
        Ok(Self(delta))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The integer order of the classical derivative inside the Caputo integral:
    /// 1 for `δ < 1`, 2 for `δ > 1`.
    #[inline]
    pub fn ceiling(self) -> u32 {
        if self.0 < 1.0 {
            1
        } else {
            2
        }
    }

    /// `δ̄ - δ ∈ (0,1)`, the exponent of the Caputo kernel `(t-s)^{δ̄-δ-1}`.
    #[inline]
    pub fn kernel_exponent(self) -> f64 {
        f64::from(self.ceiling()) - self.0
    }
}

/// Truncation policy for the Mittag-Leffler type series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvalConfig {
    abs_tol: f64,
    max_terms: usize,
    arg_bound: f64,
}

impl SeriesEvalConfig {
    pub fn new(abs_tol: f64, max_terms: usize, arg_bound: f64) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::Domain { what: "abs_tol must be positive", value: abs_tol });
        }
        if max_terms == 0 {
            return Err(Error::InvalidInput("max_terms must be at least 1"));
        }
        if !(arg_bound > 0.0) {
            return Err(Error::Domain { what: "arg_bound must be positive", value: arg_bound });
        }
        Ok(Self { abs_tol, max_terms, arg_bound })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn arg_bound(&self) -> f64 {
        self.arg_bound
    }
}

impl Default for SeriesEvalConfig {
    fn default() -> Self {
        Self { abs_tol: 1e-16, max_terms: 10_000, arg_bound: 50.0 }
    }
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

// (n-1)! for n = 1..=23; exact in f64.
const FACTORIALS: [f64; 23] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
    51090942171709440000.0,
    1124000727777607680000.0,
];

#[inline]
fn lanczos_sum(xm1: f64) -> f64 {
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (xm1 + i as f64);
    }
    acc
}

/// Γ(x) for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::Domain { what: "gamma needs a finite positive argument", value: x });
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if libm::trunc(x) == x && x <= FACTORIALS.len() as f64 {
        return FACTORIALS[x as usize - 1];
    }
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the Lanczos argument in its accurate range.
        return gamma_unchecked(x + 1.0) / x;
    }
    let xm1 = x - 1.0;
    let w = xm1 + LANCZOS_G + 0.5;
    if x > 140.0 {
        return libm::exp(ln_gamma_unchecked(x));
    }
    // w^(x-1/2) split in two halves so the product cannot overflow before exp(-w) is applied.
    let half = libm::pow(w, 0.5 * (xm1 + 0.5));
    SQRT_2PI * half * libm::exp(-w) * half * lanczos_sum(xm1)
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || x.is_infinite() {
        return Err(Error::Domain { what: "ln_gamma needs a finite positive argument", value: x });
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return ln_gamma_unchecked(x + 1.0) - libm::log(x);
    }
    let xm1 = x - 1.0;
    let w = xm1 + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (xm1 + 0.5) * libm::log(w) - w + libm::log(lanczos_sum(xm1))
}

/// `base^k / Γ(gamma_arg)` for `base ≥ 0`, switching to logarithms when the
/// direct quotient would overflow.
fn power_over_gamma(base: f64, k: usize, gamma_arg: f64) -> f64 {
    if base == 0.0 {
        return if k == 0 { 1.0 / gamma_unchecked(gamma_arg) } else { 0.0 };
    }
    let log_pow = k as f64 * libm::log(base);
    if gamma_arg <= 140.0 && log_pow.abs() < 650.0 {
        libm::pow(base, k as f64) / gamma_unchecked(gamma_arg)
    } else {
        libm::exp(log_pow - ln_gamma_unchecked(gamma_arg))
    }
}

/// Largest rounding error accepted from cancellation in an alternating series.
const MAX_CANCELLATION_ERROR: f64 = 1e-9;

/// Sums `term(k)` for `k = start, start+1, ...` under the geometric tail bound.
///
/// Requires the term-magnitude ratios to be non-increasing from `start + 1` on.
/// For alternating series the largest term times machine epsilon estimates the
/// rounding error of the sum; beyond [`MAX_CANCELLATION_ERROR`] the result is
/// rejected.
fn sum_series(
    start: usize,
    cfg: &SeriesEvalConfig,
    alternating: bool,
    mut term: impl FnMut(usize) -> f64,
) -> Result<f64> {
    let mut prev = term(start);
    if !prev.is_finite() {
        return Err(Error::Overflow { k: start });
    }
    let mut sum = prev;
    let mut largest = prev.abs();
    let finish = |sum: f64, largest: f64| {
        if alternating && largest * f64::EPSILON > MAX_CANCELLATION_ERROR {
            Err(Error::PrecisionLoss { largest_term: largest })
        } else {
            Ok(sum)
        }
    };
    for k in start + 1..start + cfg.max_terms {
        let a = term(k);
        if !a.is_finite() {
            return Err(Error::Overflow { k });
        }
        sum += a;
        largest = largest.max(a.abs());
        if a == 0.0 {
            // Only happens for a zero argument, where every later term vanishes too.
            return finish(sum, largest);
        }
        let ratio = a.abs() / prev.abs();
        if ratio < 1.0 && a.abs() * ratio / (1.0 - ratio) <= cfg.abs_tol {
            return finish(sum, largest);
        }
        prev = a;
    }
    Err(Error::NonConvergence { terms: cfg.max_terms })
}

#[inline]
fn alternating(sign_negative: bool, k: usize) -> f64 {
    if sign_negative && k % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// `E_α(z) = Σ_{k≥0} z^k / Γ(αk + 1)`.
pub fn mittag_leffler(alpha: f64, z: f64, cfg: &SeriesEvalConfig) -> Result<f64> {
    if !(alpha > 0.0) || alpha.is_infinite() {
        return Err(Error::Domain { what: "Mittag-Leffler order must be positive", value: alpha });
    }
    if z.is_nan() || z.abs() > cfg.arg_bound {
        return Err(Error::Domain { what: "|z| exceeds the configured argument bound", value: z });
    }
    let base = z.abs();
    let neg = z < 0.0;
    sum_series(0, cfg, neg, |k| {
        alternating(neg, k) * power_over_gamma(base, k, alpha * k as f64 + 1.0)
    })
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || t.is_infinite() {
        return Err(Error::Domain { what: "time must be positive and finite", value: t });
    }
    Ok(())
}

fn check_scale(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || lambda.is_infinite() {
        return Err(Error::Domain { what: "eigenvalue scale must be non-negative", value: lambda });
    }
    Ok(())
}

/// `d/dt E_δ(-t^δ) = Σ_{k≥1} (-1)^k t^{kδ-1} / Γ(kδ)` for `t > 0`.
pub fn ml_time_derivative(delta: FractionalOrder, t: f64, cfg: &SeriesEvalConfig) -> Result<f64> {
    ml_time_derivative_scaled(delta, 1.0, t, cfg)
}

/// `d/dt E_δ(-λ t^δ) = Σ_{k≥1} (-λ)^k t^{kδ-1} / Γ(kδ)` for `t > 0`, `λ ≥ 0`.
pub fn ml_time_derivative_scaled(
    delta: FractionalOrder,
    lambda: f64,
    t: f64,
    cfg: &SeriesEvalConfig,
) -> Result<f64> {
    check_time(t)?;
    check_scale(lambda)?;
    let d = delta.value();
    let base = lambda * libm::pow(t, d);
    if base > cfg.arg_bound {
        return Err(Error::Domain { what: "λ t^δ exceeds the configured argument bound", value: base });
    }
    let sum = sum_series(1, &cfg.scaled(t), true, |k| {
        alternating(true, k) * power_over_gamma(base, k, d * k as f64)
    })?;
    Ok(sum / t)
}

/// `d²/dt² E_δ(-t^δ) = Σ_{k≥1} (-1)^k t^{kδ-2} / Γ(kδ - 1)` for `t > 0` and `δ ∈ (1,2)`.
pub fn ml_second_time_derivative(
    delta: FractionalOrder,
    t: f64,
    cfg: &SeriesEvalConfig,
) -> Result<f64> {
    ml_second_time_derivative_scaled(delta, 1.0, t, cfg)
}

/// `d²/dt² E_δ(-λ t^δ)` for `t > 0`, `λ ≥ 0` and `δ ∈ (1,2)`.
pub fn ml_second_time_derivative_scaled(
    delta: FractionalOrder,
    lambda: f64,
    t: f64,
    cfg: &SeriesEvalConfig,
) -> Result<f64> {
    if delta.ceiling() != 2 {
        return Err(Error::OrderMismatch { expected: 2, delta: delta.value() });
    }
    check_time(t)?;
    check_scale(lambda)?;
    let d = delta.value();
    let base = lambda * libm::pow(t, d);
    if base > cfg.arg_bound {
        return Err(Error::Domain { what: "λ t^δ exceeds the configured argument bound", value: base });
    }
    let sum = sum_series(1, &cfg.scaled(t * t), true, |k| {
        alternating(true, k) * power_over_gamma(base, k, d * k as f64 - 1.0)
    })?;
    Ok(sum / (t * t))
}

impl SeriesEvalConfig {
    /// Same policy for a series whose sum is later divided by `divisor`.
    fn scaled(&self, divisor: f64) -> Self {
        Self { abs_tol: self.abs_tol * divisor, ..*self }
    }
}
