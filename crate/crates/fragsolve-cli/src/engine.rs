//! Scenario execution: turning a validated [`Scenario`] into density tables
//! and moment tables.
//!
//! Point-mass data routes to the closed-form snapshot constructors (the
//! point part is kept exact in its own columns, never smeared onto the
//! grid); sampled data routes to the pointwise evaluators.  Moments come out
//! twice — once from the closed formulas, once by adaptive quadrature of the
//! full snapshot — so the table itself is a cross-check.

use serde::Serialize;

use fragsolve::constant::{
    moments_constant_decay, solve_constant_decay, solve_constant_decay_monodisperse,
    solve_constant_growth, transport_mass_prediction, ConstantError,
};
use fragsolve::grid::adaptive_quadrature;
use fragsolve::linear::{moment_linear, solve_linear, solve_linear_monodisperse, LinearError};
use fragsolve::model::{characteristic_maps, SampledDensity};
use fragsolve::oracle::moment_of_snapshot;
use fragsolve::{DensitySnapshot, DerivedParams};

use crate::config::{Initial, Route, Scenario};
use crate::error::{config, numeric, CliError};

#[derive(Debug, Clone, Serialize)]
pub struct SolveRow {
    pub t: f64,
    pub x: f64,
    pub density: f64,
    pub dirac_location: Option<f64>,
    pub dirac_weight: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentRow {
    pub t: f64,
    pub p: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub abs_diff: f64,
    pub shattering_flag: bool,
}

/// A closed moment either evaluates or is outside the admissible range for
/// the scenario's parameters; the latter is a warning, not a failure.
pub enum MomentOutcome {
    Value(f64),
    Inadmissible(String),
}

/// Upper edge of the regular support at time `t`: the image of the initial
/// top edge under the size flow.  `None` means the whole profile is past
/// extinction.
pub(crate) fn transported_top(d: &DerivedParams, x_top: f64, t: f64) -> Option<f64> {
    let xi_top = d.params.a * x_top.powf(d.params.alpha);
    characteristic_maps(d).x_from_xi(xi_top, t).ok()
}

impl Scenario {
    /// Full density snapshot at time `t` (point part + regular part).
    pub fn snapshot(&self, t: f64) -> Result<DensitySnapshot, CliError> {
        match (self.route()?, &self.initial) {
            (Route::LinearMonodisperse, Initial::Monodisperse { x0 }) => {
                solve_linear_monodisperse(&self.d, *x0, t).map_err(|e| numeric("solve", e))
            }
            (Route::ConstantDecayMonodisperse, Initial::Monodisperse { x0 }) => {
                solve_constant_decay_monodisperse(&self.d, *x0, t).map_err(|e| numeric("solve", e))
            }
            (route, Initial::Sampled(u0)) => {
                let top = match transported_top(&self.d, u0.grid()[u0.grid().len() - 1], t) {
                    Some(top) => top,
                    None => return Ok(DensitySnapshot::zero(t)),
                };
                let d = self.d.clone();
                let u0 = u0.clone();
                let eval = move |x: f64| -> f64 {
                    if x <= 0.0 {
                        return 0.0;
                    }
                    let r = match route {
                        Route::LinearSampled => {
                            solve_linear(&d, &u0, x, t).map_err(|e| e.to_string())
                        }
                        Route::ConstantDecaySampled => {
                            solve_constant_decay(&d, &u0, x, t).map_err(|e| e.to_string())
                        }
                        Route::ConstantGrowthSampled => {
                            solve_constant_growth(&d, &u0, x, t).map_err(|e| e.to_string())
                        }
                        _ => unreachable!("route/initial mismatch"),
                    };
                    // Quadrature treats NaN as non-convergent, so pointwise
                    // failures surface instead of silently flattening to 0.
                    r.unwrap_or(f64::NAN)
                };
                Ok(DensitySnapshot::new(t, None, (0.0, top), eval))
            }
            _ => unreachable!("route/initial mismatch"),
        }
    }

    /// Regular density at a single point, with errors surfaced.
    pub fn density(&self, x: f64, t: f64) -> Result<f64, CliError> {
        match (self.route()?, &self.initial) {
            (Route::LinearSampled, Initial::Sampled(u0)) => {
                solve_linear(&self.d, u0, x, t).map_err(|e| numeric("solve", e))
            }
            (Route::ConstantDecaySampled, Initial::Sampled(u0)) => {
                solve_constant_decay(&self.d, u0, x, t).map_err(|e| numeric("solve", e))
            }
            (Route::ConstantGrowthSampled, Initial::Sampled(u0)) => {
                solve_constant_growth(&self.d, u0, x, t).map_err(|e| numeric("solve", e))
            }
            _ => unreachable!("density() is for sampled scenarios"),
        }
    }

    /// Closed-form moment of order `p` at time `t`; sampled data uses the
    /// superposition of point-mass moments weighted by the initial profile.
    pub fn closed_moment(&self, p: f64, t: f64) -> Result<MomentOutcome, CliError> {
        match (self.route()?, &self.initial) {
            (Route::LinearMonodisperse, Initial::Monodisperse { x0 }) => {
                classify_linear(moment_linear(&self.d, p, t, *x0))
            }
            (Route::ConstantDecayMonodisperse, Initial::Monodisperse { x0 }) => {
                classify_constant(moments_constant_decay(&self.d, p, t, *x0))
            }
            (Route::LinearSampled, Initial::Sampled(u0)) => {
                self.superpose(u0, |y| classify_linear(moment_linear(&self.d, p, t, y)))
            }
            (Route::ConstantDecaySampled, Initial::Sampled(u0)) => self.superpose(u0, |y| {
                classify_constant(moments_constant_decay(&self.d, p, t, y))
            }),
            (Route::ConstantGrowthSampled, _) => Err(config(
                "moments",
                "constant-class growth has no closed-form moment route; \
                 use the solve or validate commands for these parameters",
            )),
            _ => unreachable!("route/initial mismatch"),
        }
    }

    /// Mass the size flow alone would carry: the no-fragmentation-loss
    /// prediction that the shattering flag compares against.
    pub fn transport_mass(&self, t: f64) -> Result<f64, CliError> {
        let s = self.d.params.mode.sign();
        let k = self.d.params.k;
        match (self.route()?, &self.initial) {
            (Route::LinearMonodisperse, Initial::Monodisperse { x0 }) => Ok(x0 * (s * k * t).exp()),
            (Route::ConstantDecayMonodisperse, Initial::Monodisperse { x0 }) => {
                transport_mass_prediction(&self.d, t, *x0).map_err(|e| numeric("transport mass", e))
            }
            (Route::LinearSampled, Initial::Sampled(u0)) => {
                let scale = (s * k * t).exp();
                self.superpose(u0, |y| Ok(MomentOutcome::Value(y * scale)))
                    .map(|o| match o {
                        MomentOutcome::Value(v) => v,
                        MomentOutcome::Inadmissible(_) => unreachable!("always admissible"),
                    })
            }
            (Route::ConstantDecaySampled, Initial::Sampled(u0)) => self
                .superpose(u0, |y| {
                    transport_mass_prediction(&self.d, t, y)
                        .map(MomentOutcome::Value)
                        .map_err(|e| numeric("transport mass", e))
                })
                .map(|o| match o {
                    MomentOutcome::Value(v) => v,
                    MomentOutcome::Inadmissible(_) => unreachable!("always admissible"),
                }),
            _ => Err(config(
                "moments",
                "no transport-mass prediction for this scenario",
            )),
        }
    }

    /// `∫ u0(y)·f(y) dy` over the sampled support, for superposing
    /// point-mass quantities; inherits inadmissibility from `f`.
    fn superpose(
        &self,
        u0: &SampledDensity,
        f: impl Fn(f64) -> Result<MomentOutcome, CliError>,
    ) -> Result<MomentOutcome, CliError> {
        let grid = u0.grid();
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        // Admissibility does not depend on the point-mass position; classify
        // once at the midpoint.
        match f(0.5 * (lo + hi))? {
            MomentOutcome::Inadmissible(reason) => {
                return Ok(MomentOutcome::Inadmissible(reason));
            }
            MomentOutcome::Value(_) => {}
        }
        let integrand = |y: f64| match f(y) {
            Ok(MomentOutcome::Value(v)) => u0.eval(y) * v,
            _ => f64::NAN,
        };
        // Integrate cell by cell: the profile is only piecewise smooth.
        let mut total = 0.0;
        for w in grid.windows(2) {
            total += adaptive_quadrature(&integrand, w[0], w[1], 1e-10, 1e-14)
                .map_err(|e| numeric("superposition quadrature", e))?
                .value;
        }
        if !total.is_finite() {
            return Err(CliError::Numeric(
                "superposition quadrature: point-mass evaluation failed inside the integral"
                    .into(),
            ));
        }
        Ok(MomentOutcome::Value(total))
    }
}

fn classify_linear(r: Result<f64, LinearError>) -> Result<MomentOutcome, CliError> {
    match r {
        Ok(v) => Ok(MomentOutcome::Value(v)),
        Err(LinearError::InadmissibleMoment { reason, .. }) => {
            Ok(MomentOutcome::Inadmissible(reason))
        }
        Err(LinearError::InvalidArgument { name: "p", reason }) => {
            Ok(MomentOutcome::Inadmissible(reason))
        }
        Err(e) => Err(numeric("closed-form moment", e)),
    }
}

fn classify_constant(r: Result<f64, ConstantError>) -> Result<MomentOutcome, CliError> {
    match r {
        Ok(v) => Ok(MomentOutcome::Value(v)),
        Err(ConstantError::InadmissibleMoment { reason, .. }) => {
            Ok(MomentOutcome::Inadmissible(reason))
        }
        Err(ConstantError::InvalidArgument { name: "p", reason }) => {
            Ok(MomentOutcome::Inadmissible(reason))
        }
        Err(e) => Err(numeric("closed-form moment", e)),
    }
}

/// Density table: one row per (time, evaluation point), with the point mass
/// (if any) reported in its own columns.
pub fn solve_rows(s: &Scenario) -> Result<Vec<SolveRow>, CliError> {
    let xs = s
        .x_eval
        .as_ref()
        .ok_or_else(|| config("x_eval", "required for the solve command"))?;
    let mut rows = Vec::with_capacity(s.times.len() * xs.len());
    for &t in &s.times {
        let snapshot = s.snapshot(t)?;
        let sampled = matches!(s.initial, Initial::Sampled(_));
        for &x in xs {
            // Sampled scenarios evaluate directly so solver errors carry
            // context; snapshot closures must stay infallible.
            let density = if sampled {
                s.density(x, t)?
            } else {
                snapshot.regular_density(x)
            };
            if !density.is_finite() {
                return Err(CliError::Numeric(format!(
                    "solve: density at (x = {x}, t = {t}) is not finite"
                )));
            }
            rows.push(SolveRow {
                t,
                x,
                density,
                dirac_location: snapshot.dirac.map(|d| d.location),
                dirac_weight: snapshot.dirac.map(|d| d.weight),
            });
        }
    }
    Ok(rows)
}

/// Moment table: closed form vs. snapshot quadrature per (time, order), with
/// a shattering flag on mass rows that fall strictly below the
/// transport-only prediction.
pub fn moment_rows(s: &Scenario) -> Result<Vec<MomentRow>, CliError> {
    if s.moments.is_empty() {
        return Err(config("moments", "at least one moment order is required"));
    }
    let mut rows = Vec::with_capacity(s.times.len() * s.moments.len());
    for &t in &s.times {
        let snapshot = s.snapshot(t)?;
        let mut transport: Option<f64> = None;
        for &p in &s.moments {
            let closed = match s.closed_moment(p, t)? {
                MomentOutcome::Value(v) => v,
                MomentOutcome::Inadmissible(reason) => {
                    eprintln!("warning: moments: skipping p = {p} at t = {t}: {reason}");
                    continue;
                }
            };
            let quadrature = moment_of_snapshot(&snapshot, p)
                .map_err(|e| numeric("snapshot moment quadrature", e))?
                .value;
            let shattering_flag = if p == 1.0 && t > 0.0 {
                let reference = match transport {
                    Some(v) => v,
                    None => *transport.insert(s.transport_mass(t)?),
                };
                closed < reference * (1.0 - 1e-9)
            } else {
                false
            };
            rows.push(MomentRow {
                t,
                p,
                closed_form: closed,
                quadrature,
                abs_diff: (closed - quadrature).abs(),
                shattering_flag,
            });
        }
    }
    Ok(rows)
}
