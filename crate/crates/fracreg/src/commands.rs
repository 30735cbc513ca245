//! Implementations of the subcommands; `main` only parses arguments.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use fracreg_core::caputo::{caputo_quadrature, TestFunction, TimeGrid};
use fracreg_core::exactsol::{EigenMode, ExactProblem};
use fracreg_core::fdsolver::{convergence_study, solve, SpaceGrid};
use fracreg_core::regdiag::diagnose;
use fracreg_core::specialfn::mittag_leffler;
use fracreg_core::{FractionalOrder, SeriesEvalConfig};
use thiserror::Error;

use crate::checks::{Check, Scenario};
use crate::config::{ConfigError, OutputFormat, RunConfig};
use crate::output::{self, fmt_f64, write_atomic};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Numerics(#[from] fracreg_core::Error),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

impl CommandError {
    /// 2 for configuration and argument problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) | CommandError::Argument(_) => 2,
            _ => 1,
        }
    }
}

pub type CommandResult = Result<String, CommandError>;

fn arg_err(e: impl ToString) -> CommandError {
    CommandError::Argument(e.to_string())
}

pub fn mlf(alpha: f64, z: f64, tol: f64) -> CommandResult {
    let cfg = SeriesEvalConfig::new(tol, 10_000, 50.0).map_err(arg_err)?;
    let v = mittag_leffler(alpha, z, &cfg).map_err(|e| match e {
        fracreg_core::Error::Domain { .. } => arg_err(e),
        other => CommandError::Numerics(other),
    })?;
    Ok(format!("{}\n", fmt_f64(v)))
}

pub fn caputo(function: &str, delta: f64, t: f64, tol: f64) -> CommandResult {
    let g = TestFunction::from_name(function).ok_or_else(|| {
        let names: Vec<&str> = TestFunction::ALL.iter().map(|g| g.name()).collect();
        arg_err(format!("unknown function '{function}', expected one of {}", names.join(", ")))
    })?;
    let d = FractionalOrder::new(delta).map_err(arg_err)?;
    let order = d.ceiling();
    let v = caputo_quadrature(|s| g.derivative(order, s, d), d, t, tol)?;
    let mut s = format!("quadrature = {}\n", fmt_f64(v));
    if let Some(a) = g.analytic_caputo(d, t) {
        let _ = writeln!(s, "closed_form = {}", fmt_f64(a));
        let _ = writeln!(s, "difference = {:.3e}", (v - a).abs());
    }
    Ok(s)
}

/// `modes` are `(k, c)` pairs; an empty list means the single mode `sin x`.
pub fn exact(delta: f64, x: f64, t: f64, modes: &[(u32, f64)]) -> CommandResult {
    let d = FractionalOrder::new(delta).map_err(arg_err)?;
    let modes = if modes.is_empty() {
        vec![EigenMode::new(1, 1.0)?]
    } else {
        modes.iter().map(|&(k, c)| EigenMode::new(k, c)).collect::<Result<Vec<_>, _>>().map_err(arg_err)?
    };
    if !(0.0..=PI).contains(&x) {
        return Err(arg_err("x must lie in [0, pi]"));
    }
    let p = ExactProblem::new(d, modes, t.max(f64::MIN_POSITIVE)).map_err(arg_err)?;
    let mut s = format!("v = {}\n", fmt_f64(p.exact_value(x, t)?));
    if t > 0.0 {
        let _ = writeln!(s, "v_t = {}", fmt_f64(p.exact_dt(x, t)?));
        if d.ceiling() == 2 {
            let _ = writeln!(s, "v_tt = {}", fmt_f64(p.exact_dtt(x, t)?));
        }
    }
    Ok(s)
}

fn stem(config: &Path) -> String {
    config.file_stem().map_or_else(|| "run".to_string(), |s| s.to_string_lossy().into_owned())
}

fn artifact(cfg: &RunConfig, config: &Path, suffix: &str) -> PathBuf {
    cfg.output_dir.join(format!("{}_{suffix}", stem(config)))
}

pub fn solve_config(config: &Path) -> CommandResult {
    let cfg = RunConfig::load(config)?;
    let space = SpaceGrid::for_spec(&cfg.spec, cfg.numerics.cells)?;
    let time = TimeGrid::new(cfg.spec.horizon(), cfg.numerics.intervals, cfg.numerics.grading)?;
    let field = solve(&cfg.spec, &space, &time)?;
    let path = artifact(&cfg, config, "field.csv");
    write_atomic(&path, &output::field_csv(&field)?)?;
    log::info!("wrote {}", path.display());
    let mut s = format!("levels = {}, nodes = {}\n", time.nodes().len(), space.nodes().len());
    let _ = writeln!(s, "max |u| = {}", fmt_f64(field.max_abs()));
    if let Some(r) = &cfg.reference {
        let mut row = vec![0.0; space.nodes().len()];
        r.as_solution().level(cfg.spec.horizon(), space.nodes(), &mut row)?;
        let m = time.intervals();
        let err = field.level(m).iter().zip(&row).fold(0.0f64, |e, (u, v)| e.max((u - v).abs()));
        let _ = writeln!(s, "max error at T = {}", fmt_f64(err));
    }
    let _ = writeln!(s, "field written to {}", path.display());
    Ok(s)
}

pub fn converge_config(config: &Path) -> CommandResult {
    let cfg = RunConfig::load(config)?;
    let space = SpaceGrid::for_spec(&cfg.spec, cfg.numerics.cells)?;
    let reference = cfg.reference.as_ref().map(|r| r.as_solution());
    let report = convergence_study(&cfg.spec, &space, &cfg.numerics.m_list, cfg.numerics.grading, reference)?;
    let table = output::convergence_table(&report);
    let path = match cfg.format {
        OutputFormat::Csv => {
            let p = artifact(&cfg, config, "convergence.csv");
            write_atomic(&p, &output::convergence_csv(&report)?)?;
            p
        }
        OutputFormat::Table => {
            let p = artifact(&cfg, config, "convergence.txt");
            write_atomic(&p, table.as_bytes())?;
            p
        }
    };
    Ok(format!("{table}table written to {}\n", path.display()))
}

pub fn diagnose_config(config: &Path, probe: bool) -> CommandResult {
    let cfg = RunConfig::load(config)?;
    let space = SpaceGrid::for_spec(&cfg.spec, cfg.numerics.cells)?;
    let report = diagnose(&cfg.spec, &space, probe.then_some(cfg.numerics.probe))?;
    let text = output::diagnostics_text(&report);
    write_atomic(&artifact(&cfg, config, "diagnostics.txt"), text.as_bytes())?;
    if let Some(w) = &report.forced_phi0 {
        write_atomic(&artifact(&cfg, config, "forced_phi0.csv"), &output::forced_phi0_csv(space.nodes(), w)?)?;
    }
    if !report.fit_samples.is_empty() {
        write_atomic(&artifact(&cfg, config, "fit.csv"), &output::samples_csv(["t", "secant"], &report.fit_samples)?)?;
    }
    Ok(text)
}

/// Runs a scenario; the flag is true when every check passed.
pub fn repro(scenario: Scenario) -> (String, bool) {
    let checks: Vec<Check> = scenario.run();
    let mut s = String::new();
    for c in &checks {
        let _ = writeln!(s, "{c}");
    }
    let ok = checks.iter().all(|c| c.passed);
    let _ = writeln!(s, "{} of {} checks passed", checks.iter().filter(|c| c.passed).count(), checks.len());
    (s, ok)
}
