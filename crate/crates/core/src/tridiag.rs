//! Thomas algorithm for tridiagonal systems.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Solves `A x = rhs` with `A` given by its three diagonals.
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (so `lower[0]` is ignored) and
/// `upper[i]` multiplies `x[i+1]` (so `upper[n-1]` is ignored). A zero or
/// non-finite pivot is reported as [`Error::SingularSystem`].
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    for len in [lower.len(), upper.len(), rhs.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    let mut pivot = diag[0];
    check_pivot(pivot, diag[0], 0)?;
    c.push(upper[0] / pivot);
    d.push(rhs[0] / pivot);
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        check_pivot(pivot, diag[i], i)?;
        c.push(upper[i] / pivot);
        d.push((rhs[i] - lower[i] * d[i - 1]) / pivot);
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

fn check_pivot(pivot: f64, scale: f64, row: usize) -> Result<()> {
    if !pivot.is_finite() || pivot.abs() <= 1e-14 * scale.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::SingularSystem { row });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3, 5, 3] has x = [1, 1, 1]
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0], &[3.0, 5.0, 3.0])
            .unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn nonsymmetric_system_against_dense_product() {
        let lower = [0.0, -1.0, 0.5, 2.0];
        let diag = [4.0, 5.0, 3.0, 6.0];
        let upper = [1.0, -2.0, 1.5, 0.0];
        let want = [1.0, -2.0, 0.5, 3.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                let mut s = diag[i] * want[i];
                if i > 0 {
                    s += lower[i] * want[i - 1];
                }
                if i < 3 {
                    s += upper[i] * want[i + 1];
                }
                s
            })
            .collect();
        let x = solve_tridiagonal(&lower, &diag, &upper, &rhs).unwrap();
        for (a, b) in x.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_and_mismatched() {
        // second row becomes 1 - 1*1 = 0 after elimination
        let r = solve_tridiagonal(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(r, Err(Error::SingularSystem { row: 1 })));
        let r = solve_tridiagonal(&[0.0], &[1.0, 1.0], &[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        assert!(solve_tridiagonal(&[], &[], &[], &[]).unwrap().is_empty());
    }
}
