//! Run configuration files.
//!
//! A configuration is a TOML document with a `[problem]` table and optional
//! `[numerics]`, `[reference]` and `[output]` tables; see `configs/` for
//! commented samples. Coefficients are written as expression strings
//! (see [`crate::exprparse`]).

use std::env;
use std::path::{Path, PathBuf};

use fracreg_core::exactsol::{EigenMode, ExactProblem, ManufacturedSolution, ReferenceSolution};
use fracreg_core::expr::Var;
use fracreg_core::fdsolver::ProblemSpec;
use fracreg_core::regdiag::LayerProbe;
use fracreg_core::{Expr, FractionalOrder};
use serde::Deserialize;
use thiserror::Error;

use crate::exprparse::parse_expr;

/// Environment variable that relocates relative output directories.
pub const OUTPUT_ROOT_VAR: &str = "FRACREG_OUT";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Syntax(#[from] toml::de::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl ToString) -> ConfigError {
    ConfigError::Field { field: field.to_string(), message: message.to_string() }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: RawProblem,
    #[serde(default)]
    numerics: RawNumerics,
    reference: Option<RawReference>,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    preset: Option<String>,
    delta: f64,
    horizon: f64,
    interval: Option<[Scalar; 2]>,
    p: Option<String>,
    q: Option<String>,
    r: Option<String>,
    f: Option<String>,
    psi_left: Option<String>,
    psi_right: Option<String>,
    phi0: Option<String>,
    phi1: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    cells: Option<usize>,
    intervals: Option<usize>,
    grading: Option<f64>,
    m_list: Option<Vec<usize>>,
    probe_intervals: Option<usize>,
    probe_grading: Option<f64>,
    probe_window: Option<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "lowercase")]
enum RawReference {
    Modes { modes: Vec<(u32, f64)> },
    Manufactured { u: String },
    Fine,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
    format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Table,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    pub cells: usize,
    pub intervals: usize,
    pub grading: f64,
    pub m_list: Vec<usize>,
    pub probe: LayerProbe,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { cells: 64, intervals: 256, grading: 1.0, m_list: vec![32, 64, 128, 256], probe: LayerProbe::default() }
    }
}

/// Ground truth used by `converge`.
#[derive(Debug, Clone)]
pub enum Reference {
    Modes(ExactProblem),
    Manufactured(ManufacturedSolution),
}

impl Reference {
    pub fn as_solution(&self) -> &dyn ReferenceSolution {
        match self {
            Reference::Modes(p) => p,
            Reference::Manufactured(u) => u,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    pub numerics: Numerics,
    /// `None` means a fine-mesh reference.
    pub reference: Option<Reference>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let delta = FractionalOrder::new(raw.problem.delta).map_err(|e| field_err("problem.delta", e))?;
        let (spec, preset_reference) = build_problem(&raw.problem, delta)?;
        let numerics = build_numerics(raw.numerics)?;
        let reference = match raw.reference {
            None => preset_reference,
            Some(RawReference::Fine) => None,
            Some(RawReference::Modes { modes }) => {
                if spec.interval() != (0.0, std::f64::consts::PI) {
                    return Err(field_err("reference.modes", "eigenmode references need the interval [0, pi]"));
                }
                let modes = modes
                    .into_iter()
                    .map(|(k, c)| EigenMode::new(k, c))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| field_err("reference.modes", e))?;
                let exact = ExactProblem::new(delta, modes, spec.horizon()).map_err(|e| field_err("reference.modes", e))?;
                Some(Reference::Modes(exact))
            }
            Some(RawReference::Manufactured { u }) => {
                let u = expr_field("reference.u", &u, delta)?;
                Some(Reference::Manufactured(ManufacturedSolution::new(u)))
            }
        };
        let dir = raw.output.dir.unwrap_or_else(|| PathBuf::from("out"));
        Ok(Self { spec, numerics, reference, output_dir: resolve_output(&dir), format: raw.output.format.unwrap_or_default() })
    }
}

/// Places a relative `dir` under `$FRACREG_OUT` when that variable is set.
pub fn resolve_output(dir: &Path) -> PathBuf {
    match env::var_os(OUTPUT_ROOT_VAR) {
        Some(root) if dir.is_relative() => PathBuf::from(root).join(dir),
        _ => dir.to_path_buf(),
    }
}

fn expr_field(field: &str, src: &str, delta: FractionalOrder) -> Result<Expr, ConfigError> {
    parse_expr(src, Some(delta.value())).map_err(|e| field_err(field, e))
}

fn build_problem(raw: &RawProblem, delta: FractionalOrder) -> Result<(ProblemSpec, Option<Reference>), ConfigError> {
    if let Some(preset) = &raw.preset {
        let extra = [
            ("interval", raw.interval.is_some()),
            ("p", raw.p.is_some()),
            ("q", raw.q.is_some()),
            ("r", raw.r.is_some()),
            ("f", raw.f.is_some()),
            ("psi_left", raw.psi_left.is_some()),
            ("psi_right", raw.psi_right.is_some()),
            ("phi0", raw.phi0.is_some()),
            ("phi1", raw.phi1.is_some()),
        ];
        if let Some((name, _)) = extra.iter().find(|(_, set)| *set) {
            return Err(field_err(&format!("problem.{name}"), "cannot be combined with a preset"));
        }
        let err = |e| field_err("problem.preset", e);
        return match preset.as_str() {
            "sine_relaxation" => {
                let spec = ProblemSpec::sine_relaxation(delta, raw.horizon).map_err(err)?;
                let exact = ExactProblem::single_mode(delta, raw.horizon).map_err(err)?;
                Ok((spec, Some(Reference::Modes(exact))))
            }
            "smooth_manufactured" => {
                let spec = ProblemSpec::smooth_manufactured(delta, raw.horizon).map_err(err)?;
                let u = (Expr::one() + Expr::t().powf(2.0)) * Expr::x().sin();
                Ok((spec, Some(Reference::Manufactured(ManufacturedSolution::new(u)))))
            }
            other => Err(field_err("problem.preset", format!("unknown preset '{other}'"))),
        };
    }

    let endpoint = |field: &str, s: &Scalar| -> Result<f64, ConfigError> {
        match s {
            Scalar::Number(v) => Ok(*v),
            Scalar::Text(src) => {
                let e = expr_field(field, src, delta)?;
                e.as_const().ok_or_else(|| field_err(field, "must be a constant"))
            }
        }
    };
    let (a, b) = match &raw.interval {
        Some([a, b]) => (endpoint("problem.interval[0]", a)?, endpoint("problem.interval[1]", b)?),
        None => (0.0, std::f64::consts::PI),
    };
    let opt = |field: &str, src: &Option<String>| -> Result<Option<Expr>, ConfigError> {
        src.as_deref().map(|s| expr_field(field, s, delta)).transpose()
    };
    let mut builder = ProblemSpec::builder(a, b, raw.horizon, delta);
    if let Some(p) = opt("problem.p", &raw.p)? {
        builder = builder.p(p);
    }
    if let Some(q) = opt("problem.q", &raw.q)? {
        builder = builder.q(q);
    }
    if let Some(r) = opt("problem.r", &raw.r)? {
        builder = builder.r(r);
    }
    if let Some(f) = opt("problem.f", &raw.f)? {
        builder = builder.f(f);
    }
    let left = opt("problem.psi_left", &raw.psi_left)?.unwrap_or_else(Expr::zero);
    let right = opt("problem.psi_right", &raw.psi_right)?.unwrap_or_else(Expr::zero);
    for (name, e) in [("problem.psi_left", &left), ("problem.psi_right", &right)] {
        if !e.is_free_of(Var::X) {
            return Err(field_err(name, "may depend on t only"));
        }
    }
    builder = builder.psi(left, right);
    if let Some(phi0) = opt("problem.phi0", &raw.phi0)? {
        if !phi0.is_free_of(Var::T) {
            return Err(field_err("problem.phi0", "may depend on x only"));
        }
        builder = builder.phi0(phi0);
    }
    match (opt("problem.phi1", &raw.phi1)?, delta.ceiling()) {
        (Some(phi1), 2) => builder = builder.phi1(phi1),
        (None, 2) => return Err(field_err("problem.phi1", "required when delta > 1")),
        (Some(_), _) => return Err(field_err("problem.phi1", "only allowed when delta > 1")),
        (None, _) => {}
    }
    let spec = builder.build().map_err(|e| field_err("problem", e))?;
    Ok((spec, None))
}

fn build_numerics(raw: RawNumerics) -> Result<Numerics, ConfigError> {
    let d = Numerics::default();
    let n = Numerics {
        cells: raw.cells.unwrap_or(d.cells),
        intervals: raw.intervals.unwrap_or(d.intervals),
        grading: raw.grading.unwrap_or(d.grading),
        m_list: raw.m_list.unwrap_or(d.m_list),
        probe: LayerProbe {
            intervals: raw.probe_intervals.unwrap_or(d.probe.intervals),
            grading: raw.probe_grading.unwrap_or(d.probe.grading),
            window: raw.probe_window.map_or(d.probe.window, |w| (w[0], w[1])),
        },
    };
    if n.cells < 2 {
        return Err(field_err("numerics.cells", "must be at least 2"));
    }
    if n.intervals == 0 || n.probe.intervals == 0 {
        return Err(field_err("numerics.intervals", "must be positive"));
    }
    if !(n.grading >= 1.0 && n.grading.is_finite()) {
        return Err(field_err("numerics.grading", "must be at least 1"));
    }
    if !(n.probe.grading >= 1.0 && n.probe.grading.is_finite()) {
        return Err(field_err("numerics.probe_grading", "must be at least 1"));
    }
    let (lo, hi) = n.probe.window;
    if !(lo >= 0.0 && hi > lo && hi <= 1.0) {
        return Err(field_err("numerics.probe_window", "must satisfy 0 <= lo < hi <= 1"));
    }
    if n.m_list.len() < 3 || n.m_list.windows(2).any(|w| w[1] <= w[0]) || n.m_list[0] == 0 {
        return Err(field_err("numerics.m_list", "needs at least three strictly increasing positive sizes"));
    }
    Ok(n)
}
