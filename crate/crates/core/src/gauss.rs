//! Gauss-Legendre panels and the dyadic integrator used by the Caputo quadrature.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

pub(crate) struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule on `[-1, 1]`, nodes found by Newton iteration on `P_n`.
    pub(crate) fn new(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        Self { nodes, weights }
    }

    pub(crate) fn integrate(&self, f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A pair of nested-accuracy rules; the difference is the error estimate.
pub(crate) struct PanelRule {
    coarse: GaussLegendre,
    fine: GaussLegendre,
}

const MAX_BISECTIONS: u32 = 40;
const MAX_DYADIC_LEVELS: usize = 900;

impl PanelRule {
    pub(crate) fn new() -> Self {
        Self { coarse: GaussLegendre::new(10), fine: GaussLegendre::new(20) }
    }

    /// Adaptive bisection on `[a, b]` until each panel's estimate meets its share of `tol`.
    pub(crate) fn adaptive(
        &self,
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
    ) -> Result<f64> {
        self.adaptive_inner(f, a, b, tol, MAX_BISECTIONS)
    }

    fn adaptive_inner(
        &self,
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let fine = self.fine.integrate(f, a, b);
        let coarse = self.coarse.integrate(f, a, b);
        if !fine.is_finite() {
            return Err(Error::QuadratureFailure { estimate: f64::INFINITY, tol });
        }
        let err = (fine - coarse).abs();
        // Stop once the estimate is at rounding level of the panel value.
        if err <= tol || err <= 4.0 * f64::EPSILON * fine.abs() {
            return Ok(fine);
        }
        if depth == 0 {
            return Err(Error::QuadratureFailure { estimate: err, tol });
        }
        let mid = 0.5 * (a + b);
        Ok(self.adaptive_inner(f, a, mid, 0.5 * tol, depth - 1)?
            + self.adaptive_inner(f, mid, b, 0.5 * tol, depth - 1)?)
    }

    /// `∫_0^length h(u) du` for `h` with at most an integrable algebraic singularity at 0.
    ///
    /// Panels `[L 2^{-j-1}, L 2^{-j}]` are added until the geometric tail estimate
    /// `|P_j| ρ / (1 - ρ)`, with `ρ = |P_j / P_{j-1}|`, falls below `tol / 2`.
    pub(crate) fn toward_zero(
        &self,
        h: &mut impl FnMut(f64) -> f64,
        length: f64,
        tol: f64,
    ) -> Result<f64> {
        const SHARE: f64 = 6.0 / (PI * PI);
        let mut sum = 0.0;
        let mut prev: Option<f64> = None;
        let mut hi = length;
        for j in 0..MAX_DYADIC_LEVELS {
            let lo = 0.5 * hi;
            let jf = (j + 1) as f64;
            let panel = self.adaptive(h, lo, hi, 0.5 * tol * SHARE / (jf * jf))?;
            sum += panel;
            if let Some(p) = prev {
                if panel == 0.0 && p == 0.0 {
                    return Ok(sum);
                }
                let ratio = panel.abs() / p.abs();
                if ratio < 1.0 && panel.abs() * ratio / (1.0 - ratio) <= 0.5 * tol {
                    return Ok(sum);
                }
            }
            prev = Some(panel);
            hi = lo;
        }
        Err(Error::QuadratureFailure { estimate: prev.unwrap_or(f64::NAN).abs(), tol })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let rule = GaussLegendre::new(10);
        // exact up to degree 19
        let v = rule.integrate(&mut |x| libm::pow(x, 18.0), -1.0, 1.0);
        assert_relative_eq!(v, 2.0 / 19.0, max_relative = 1e-14);
        let w: f64 = rule.weights.iter().sum();
        assert_relative_eq!(w, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn toward_zero_handles_algebraic_singularity() {
        let rule = PanelRule::new();
        // ∫_0^1 u^{-0.8} du = 5
        let v = rule.toward_zero(&mut |u| libm::pow(u, -0.8), 1.0, 1e-10).unwrap();
        assert!((v - 5.0).abs() < 1e-10, "{v}");
        // smooth integrand
        let v = rule.toward_zero(&mut |u| libm::cos(u), 2.0, 1e-12).unwrap();
        assert!((v - libm::sin(2.0)).abs() < 1e-12);
        assert_eq!(rule.toward_zero(&mut |_| 0.0, 1.0, 1e-12).unwrap(), 0.0);
    }
}
