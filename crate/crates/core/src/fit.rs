//! Least-squares line fits, mostly in log-log coordinates.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Slope and intercept of the least-squares line through `points`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points"));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateFit("abscissae coincide"));
    }
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

/// Slope of `ln y` against `ln x`; every coordinate must be positive.
pub fn loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    let logs = points
        .iter()
        .map(|&(x, y)| {
            if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
                Ok((libm::log(x), libm::log(y)))
            } else {
                Err(Error::DegenerateFit("log-log fit needs positive finite data"))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    linear_fit(&logs).map(|(slope, _)| slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law_exponent() {
        let pts: Vec<(f64, f64)> =
            (1..=8).map(|i| (f64::from(i), 3.0 * libm::pow(f64::from(i), -0.6))).collect();
        assert!((loglog_slope(&pts).unwrap() + 0.6).abs() < 1e-13);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(linear_fit(&[(1.0, 2.0)]).is_err());
        assert!(linear_fit(&[(1.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(loglog_slope(&[(1.0, 2.0), (2.0, 0.0)]).is_err());
    }
}
