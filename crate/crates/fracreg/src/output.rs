//! CSV and plain-text artifacts.
//!
//! Numbers are written as `{:.16e}` (17 significant digits) so every `f64`
//! survives a round trip. Files are written to a temporary sibling and then
//! renamed into place.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use fracreg_core::fdsolver::{ConvergenceReport, ReferenceKind, SolutionField};
use fracreg_core::regdiag::{Assumption1, DiagnosticsReport};
use tempfile::NamedTempFile;

/// Round-trip formatting of a double.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to `path` atomically, creating parent directories.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> io::Result<Vec<u8>>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

/// Long-format grid dump: `n, i, t, x, u`.
pub fn field_csv(field: &SolutionField) -> io::Result<Vec<u8>> {
    let xs = field.space().nodes();
    let ts = field.time().nodes();
    let rows = ts.iter().enumerate().flat_map(|(n, &t)| {
        xs.iter().enumerate().map(move |(i, &x)| {
            vec![n.to_string(), i.to_string(), fmt_f64(t), fmt_f64(x), fmt_f64(field.value(n, i))]
        })
    });
    csv_bytes(&["n", "i", "t", "x", "u"], rows)
}

pub fn convergence_csv(report: &ConvergenceReport) -> io::Result<Vec<u8>> {
    let rows = report.entries.iter().map(|e| {
        vec![e.intervals.to_string(), fmt_f64(e.dt), fmt_f64(e.max_error), fmt_f64(e.error_at_horizon)]
    });
    csv_bytes(&["M", "dt", "max_error", "error_at_T"], rows)
}

pub fn convergence_table(report: &ConvergenceReport) -> String {
    let mut s = String::new();
    let reference = match report.reference {
        ReferenceKind::Exact => "exact solution".to_string(),
        ReferenceKind::FineMesh { intervals, cells } => format!("fine mesh (M = {intervals}, N = {cells})"),
    };
    let _ = writeln!(s, "grading r = {}, N = {}, reference: {reference}", report.grading, report.cells);
    let _ = writeln!(s, "{:>8}  {:>12}  {:>12}  {:>8}  {:>12}  {:>8}", "M", "dt", "max error", "rate", "error at T", "rate");
    let mut prev: Option<(f64, f64, f64)> = None;
    for e in &report.entries {
        let rates = prev.map(|(dt, a, b)| {
            let r = (dt / e.dt).ln();
            ((a / e.max_error).ln() / r, (b / e.error_at_horizon).ln() / r)
        });
        let (r1, r2) = rates.map_or((String::from("-"), String::from("-")), |(a, b)| (format!("{a:.3}"), format!("{b:.3}")));
        let _ = writeln!(
            s,
            "{:>8}  {:>12.4e}  {:>12.4e}  {:>8}  {:>12.4e}  {:>8}",
            e.intervals, e.dt, e.max_error, r1, e.error_at_horizon, r2
        );
        prev = Some((e.dt, e.max_error, e.error_at_horizon));
    }
    let _ = writeln!(s, "fitted order (max over all levels): {:.4}", report.order);
    let _ = writeln!(s, "fitted order (error at T):          {:.4}", report.order_at_horizon);
    s
}

pub fn assumption_name(a: Assumption1) -> &'static str {
    match a {
        Assumption1::MaxPrinciple => "max-principle",
        Assumption1::EnergyCondition => "energy-condition",
        Assumption1::Undetermined => "undetermined",
    }
}

pub fn diagnostics_text(report: &DiagnosticsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "incompat_residual = {}", fmt_f64(report.incompat_residual));
    let _ = writeln!(
        s,
        "discrete_residual = {} (h^2 floor {})",
        fmt_f64(report.discrete_residual.residual),
        fmt_f64(report.discrete_residual.floor)
    );
    let _ = writeln!(s, "uniqueness_condition = {}", assumption_name(report.assumption1));
    let _ = writeln!(s, "sampling_points = {}", report.sampling_points);
    match &report.forced_phi0 {
        Some(w) => {
            let max = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let _ = writeln!(s, "forced_phi0_max_abs = {}", fmt_f64(max));
        }
        None => {
            let _ = writeln!(s, "forced_phi0 = none");
        }
    }
    let _ = writeln!(s, "collapse = {}", report.collapse);
    if let Some(i) = report.probe_node {
        let _ = writeln!(s, "probe_node = {i}");
    }
    match report.fitted_exponent {
        Some(e) => {
            let _ = writeln!(s, "fitted_exponent = {e:.6}");
        }
        None => {
            let _ = writeln!(s, "fitted_exponent = none");
        }
    }
    let smooth_possible = report.incompat_residual <= report.discrete_residual.floor;
    let _ = writeln!(
        s,
        "verdict = {}",
        if smooth_possible { "initial data compatible with a smooth solution" } else { "initial layer forced" }
    );
    s
}

pub fn forced_phi0_csv(xs: &[f64], w: &[f64]) -> io::Result<Vec<u8>> {
    csv_bytes(&["x", "phi0"], xs.iter().zip(w).map(|(&x, &v)| vec![fmt_f64(x), fmt_f64(v)]))
}

pub fn samples_csv(header: [&str; 2], samples: &[(f64, f64)]) -> io::Result<Vec<u8>> {
    csv_bytes(&header, samples.iter().map(|&(a, b)| vec![fmt_f64(a), fmt_f64(b)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubles_round_trip() {
        for v in [0.1, 1.0 / 3.0, f64::MIN_POSITIVE, 6.02214076e23, -2.5e-300] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub").join("a.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn csv_layout() {
        let bytes = samples_csv(["t", "v"], &[(1.0, 2.0)]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "t,v\n1.0000000000000000e0,2.0000000000000000e0\n");
    }
}
