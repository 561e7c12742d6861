//! Scenario files: declarative TOML descriptions of a run.
//!
//! A scenario bundles the physical parameters, the initial size
//! distribution, the evaluation times and grid, the moment orders of
//! interest, and the output destination.  Parsing is strict (unknown keys
//! are rejected) and every validation message names the offending field so
//! a bad file can be fixed without reading source code.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use fragsolve::grid::{linear_grid, log_grid};
use fragsolve::model::{derive, Mode, ParamClass, SampledDensity};
use fragsolve::{DerivedParams, PhysicalParams};

use crate::error::{config, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected \"csv\" or \"json\", got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ModeSpec {
    Growth,
    Decay,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsSpec {
    alpha: f64,
    nu: f64,
    gamma: f64,
    k: f64,
    a: f64,
    mode: ModeSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum InitialSpec {
    /// A unit point mass at `x0`.
    Monodisperse { x0: f64 },
    /// Explicit samples, interpolated between nodes and zero outside.
    Sampled { grid: Vec<f64>, values: Vec<f64> },
    /// A Gaussian bump `exp(−(x−center)²/(2·width²))` sampled on a uniform
    /// grid across `support`; a convenient smooth test profile.
    Gaussian {
        center: f64,
        width: f64,
        support: [f64; 2],
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ScaleSpec {
    Log,
    Linear,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSpec {
    min: f64,
    max: f64,
    points: usize,
    scale: ScaleSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSpec {
    path: PathBuf,
    format: Format,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    params: ParamsSpec,
    initial: InitialSpec,
    times: Vec<f64>,
    x_eval: Option<GridSpec>,
    #[serde(default)]
    moments: Vec<f64>,
    #[serde(default)]
    validate: bool,
    output: Option<OutputSpec>,
}

/// Initial size distribution after validation.
#[derive(Debug, Clone)]
pub enum Initial {
    Monodisperse { x0: f64 },
    Sampled(SampledDensity),
}

/// Which solver family a scenario routes to.  Constant-class growth needs
/// integrable data (the boundary construction integrates the profile), so a
/// point mass is rejected there at configuration time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    LinearMonodisperse,
    LinearSampled,
    ConstantDecayMonodisperse,
    ConstantDecaySampled,
    ConstantGrowthSampled,
}

/// A fully validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub d: DerivedParams,
    pub initial: Initial,
    pub times: Vec<f64>,
    pub x_eval: Option<Vec<f64>>,
    pub moments: Vec<f64>,
    pub validate: bool,
    pub output: Option<(PathBuf, Format)>,
}

impl Scenario {
    pub fn route(&self) -> Result<Route, CliError> {
        let mode = self.d.params.mode;
        match (self.d.class, mode, &self.initial) {
            (ParamClass::Linear, _, Initial::Monodisperse { .. }) => Ok(Route::LinearMonodisperse),
            (ParamClass::Linear, _, Initial::Sampled(_)) => Ok(Route::LinearSampled),
            (ParamClass::Constant, Mode::Decay, Initial::Monodisperse { .. }) => {
                Ok(Route::ConstantDecayMonodisperse)
            }
            (ParamClass::Constant, Mode::Decay, Initial::Sampled(_)) => {
                Ok(Route::ConstantDecaySampled)
            }
            (ParamClass::Constant, Mode::Growth, Initial::Sampled(_)) => {
                Ok(Route::ConstantGrowthSampled)
            }
            (ParamClass::Constant, Mode::Growth, Initial::Monodisperse { .. }) => Err(config(
                "initial",
                "constant-class growth needs integrable data (the boundary construction \
                 integrates the initial profile); replace kind = \"monodisperse\" with a \
                 sampled or gaussian profile",
            )),
        }
    }
}

/// Parses and validates a scenario from TOML text.  `origin` names the
/// source (a path or a bundled scenario id) for error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, CliError> {
    let raw: RawConfig = toml::from_str(text)
        .map_err(|e| CliError::Config(format!("{origin}: {}", compact_toml_error(&e))))?;

    let mode = match raw.params.mode {
        ModeSpec::Growth => Mode::Growth,
        ModeSpec::Decay => Mode::Decay,
    };
    let params = PhysicalParams::new(
        raw.params.alpha,
        raw.params.nu,
        raw.params.gamma,
        raw.params.k,
        raw.params.a,
        mode,
    )
    .map_err(|e| config("params", e))?;
    let d = derive(params).map_err(|e| config("params", e))?;

    if raw.times.is_empty() {
        return Err(config("times", "at least one evaluation time is required"));
    }
    for (i, &t) in raw.times.iter().enumerate() {
        if !(t.is_finite() && t >= 0.0) {
            return Err(config(
                "times",
                format!("times[{i}] = {t} must be finite and nonnegative"),
            ));
        }
        if i > 0 && t <= raw.times[i - 1] {
            return Err(config(
                "times",
                format!(
                    "must be sorted strictly ascending; times[{i}] = {t} does not exceed times[{}] = {}",
                    i - 1,
                    raw.times[i - 1]
                ),
            ));
        }
    }

    for (i, &p) in raw.moments.iter().enumerate() {
        if !p.is_finite() {
            return Err(config(
                "moments",
                format!("moments[{i}] = {p} must be finite"),
            ));
        }
    }

    let initial = build_initial(&raw.initial)?;
    let x_eval = match &raw.x_eval {
        None => None,
        Some(spec) => Some(build_grid(spec)?),
    };
    let output = raw.output.map(|o| (o.path, o.format));

    Ok(Scenario {
        d,
        initial,
        times: raw.times,
        x_eval,
        moments: raw.moments,
        validate: raw.validate,
        output,
    })
}

/// Reads and parses a scenario file from disk.
pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config("--config", format!("{}: {e}", path.display())))?;
    parse_scenario(&text, &path.display().to_string())
}

fn build_initial(spec: &InitialSpec) -> Result<Initial, CliError> {
    match spec {
        InitialSpec::Monodisperse { x0 } => {
            if !(x0.is_finite() && *x0 > 0.0) {
                return Err(config(
                    "initial.x0",
                    format!("must be finite and positive, got {x0}"),
                ));
            }
            Ok(Initial::Monodisperse { x0: *x0 })
        }
        InitialSpec::Sampled { grid, values } => SampledDensity::new(grid.clone(), values.clone())
            .map(Initial::Sampled)
            .map_err(|e| config("initial", e)),
        InitialSpec::Gaussian {
            center,
            width,
            support,
            samples,
        } => {
            if !(width.is_finite() && *width > 0.0) {
                return Err(config(
                    "initial.width",
                    format!("must be finite and positive, got {width}"),
                ));
            }
            if !(center.is_finite() && *center > 0.0) {
                return Err(config(
                    "initial.center",
                    format!("must be finite and positive, got {center}"),
                ));
            }
            if *samples < 8 {
                return Err(config(
                    "initial.samples",
                    format!("needs at least 8 samples, got {samples}"),
                ));
            }
            let grid = linear_grid(support[0], support[1], *samples)
                .map_err(|e| config("initial.support", e))?;
            let values = grid
                .iter()
                .map(|&x| (-((x - center) * (x - center)) / (2.0 * width * width)).exp())
                .collect();
            SampledDensity::new(grid, values)
                .map(Initial::Sampled)
                .map_err(|e| config("initial", e))
        }
    }
}

fn build_grid(spec: &GridSpec) -> Result<Vec<f64>, CliError> {
    match spec.scale {
        ScaleSpec::Log => log_grid(spec.min, spec.max, spec.points),
        ScaleSpec::Linear => linear_grid(spec.min, spec.max, spec.points),
    }
    .map_err(|e| config("x_eval", e))
}

/// Strips the multi-line span rendering from a TOML error, keeping the
/// message and line number.
fn compact_toml_error(e: &toml::de::Error) -> String {
    let msg = e.message().to_string();
    match e.span() {
        Some(span) => format!("{msg} (at byte {})", span.start),
        None => msg,
    }
}
