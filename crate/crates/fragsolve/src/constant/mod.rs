//! Closed-form solutions for the constant class (`α = 1 − γ`, `ν = −γ`,
//! `γ ≠ 1`), where the transformed problem has constant drift
//! `β = s·a·k·α` (s = +1 growth, −1 decay) and constant-coefficient kernel.
//!
//! The drift sign splits the four (mode, sign α) configurations into two
//! families (see [`classify_case`]):
//!
//! * `β < 0` — boundary-free: growth with α < 0, decay with α > 0. The
//!   transformed density is an operator power applied to the initial
//!   profile, nothing else.
//! * `β > 0` — boundary-required: decay with α < 0 extends the data by zero
//!   on `ξ < 0`; growth with α > 0 needs the Hermite boundary construction
//!   of [`boundary_correction`].
//!
//! On top of the transformed-plane evaluators this module carries the
//! closed physical-plane decay formulas (density, monodisperse snapshot,
//! moments) written directly in `(x, t)`, including the shattering
//! diagnostics for α < 0, plus [`solve_constant_growth`], the physical-plane
//! wrapper that chains pushforward → operator evaluation → back-transform.
//!
//! Exponentials are always assembled next to the factor they damp (the
//! Kummer kernels go through [`damped_kummer`], Γ-ratios through
//! [`ln_gamma`] differences), so every path stays inside the f64 range or
//! reports [`ConstantError::Overflow`] instead of returning infinities.

mod boundary;

pub use boundary::{boundary_correction, BoundaryCorrection, GaussPoly};

use crate::grid::{gauss, GridFunction, QuadratureError};
use crate::model::{
    characteristic_maps, pushforward_initial, DensitySnapshot, DerivedParams, DiracComponent,
    InitialCondition, Mode, ModelError, ParamClass, SampledDensity, TransformedInitial,
};
use crate::operators::{build_kernel, j_power_at, Direction, OperatorError, PhiKernel};
use crate::specfun::{damped_kummer, kummer_neg, ln_gamma, tricomi_psi, SpecFunError};

/// Failures of the constant-class closed forms.
#[derive(Debug, thiserror::Error)]
pub enum ConstantError {
    /// The parameters do not belong to the constant class.
    #[error("parameters are in the {found:?} class; this solver requires the constant class")]
    ClassMismatch { found: ParamClass },
    /// The solver was called with the wrong transport mode.
    #[error("parameters use {found:?} transport; this solver requires {required:?}")]
    ModeMismatch { required: Mode, found: Mode },
    /// A scalar argument is outside its domain.
    #[error("invalid argument {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    /// The requested moment order makes the moment integral divergent.
    #[error("moment order p = {p} is inadmissible: {reason}")]
    InadmissibleMoment { p: f64, reason: String },
    /// An exponential amplification factor left the f64 range.
    #[error("amplification exponent {exponent} exceeds the floating-point range")]
    Overflow { exponent: f64 },
    /// A configuration the closed forms deliberately do not cover.
    #[error("unsupported configuration: {reason}")]
    Unsupported { reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

fn require(ok: bool, name: &'static str, reason: &str) -> Result<(), ConstantError> {
    if ok {
        Ok(())
    } else {
        Err(ConstantError::InvalidArgument {
            name,
            reason: reason.to_string(),
        })
    }
}

/// Largest exponent handed to `exp` before reporting overflow.
const MAX_EXP: f64 = 700.0;

/// Slack for recognising an integer operator power (m is a ratio of
/// user-supplied exponents, so only representation noise needs absorbing).
const INTEGER_TOL: f64 = 1e-9;

fn binomial(m: u32, n: u32) -> f64 {
    let mut acc = 1.0;
    for k in 0..n {
        acc = acc * (m - k) as f64 / (k + 1) as f64;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product::<f64>().max(1.0)
}

/// Runs a Gauss–Legendre pass over `breaks`, routing errors raised inside the
/// integrand closure back out (the quadrature itself is infallible).
fn integrate_cells_checked(
    mut f: impl FnMut(f64) -> Result<f64, ConstantError>,
    breaks: &[f64],
) -> Result<f64, ConstantError> {
    let mut err: Option<ConstantError> = None;
    let value = gauss::integrate_cells(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        breaks,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Raw constants of one solve, extracted after the class check.
#[derive(Clone, Copy)]
struct ConstCtx {
    /// Transport sign: +1 growth, −1 decay.
    s: f64,
    alpha: f64,
    nu: f64,
    k: f64,
    a: f64,
    /// Mode-signed drift `s·a·k·α` of the transformed problem.
    beta: f64,
    /// Kernel order `(ν+2)/|α|`.
    m: f64,
}

impl ConstCtx {
    fn new(d: &DerivedParams) -> Result<Self, ConstantError> {
        if d.class != ParamClass::Constant {
            return Err(ConstantError::ClassMismatch { found: d.class });
        }
        let p = &d.params;
        Ok(Self {
            s: p.mode.sign(),
            alpha: p.alpha,
            nu: p.nu,
            k: p.k,
            a: p.a,
            beta: d.beta,
            m: d.m,
        })
    }

    fn require_mode(&self, d: &DerivedParams, required: Mode) -> Result<(), ConstantError> {
        if d.params.mode == required {
            Ok(())
        } else {
            Err(ConstantError::ModeMismatch {
                required,
                found: d.params.mode,
            })
        }
    }
}

/// Whether a constant-class configuration is solvable from initial data
/// alone or needs data on the inflow side of the transformed half-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// `β < 0`: characteristics leave the half-line, initial data determines
    /// everything (growth with α < 0, decay with α > 0).
    BoundaryFree,
    /// `β > 0`: characteristics enter from `ξ < 0` (decay with α < 0 extends
    /// the data by zero; growth with α > 0 needs the Hermite extension).
    BoundaryRequired,
}

/// Classifies a constant-class parameter set by the sign of its drift.
pub fn classify_case(d: &DerivedParams) -> Result<CaseKind, ConstantError> {
    let ctx = ConstCtx::new(d)?;
    Ok(if ctx.beta < 0.0 {
        CaseKind::BoundaryFree
    } else {
        CaseKind::BoundaryRequired
    })
}

/// Integer kernel order within rounding slack, if any.
fn integer_order(m: f64) -> Option<u32> {
    let r = m.round();
    if (m - r).abs() <= INTEGER_TOL && r >= 1.0 && r <= f64::from(u32::MAX) {
        Some(r as u32)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Decay: closed physical-plane formulas
// ---------------------------------------------------------------------------

/// Density at `(x, t)` for constant-class decay, evolved from sampled data:
///
/// ```text
/// u(x,t) = e^{−½kaαt²}·[ e^{−a x^α t}·S^{(1−α)/α}·u0(x·S^{1/α})
///        + a(α+1)x^{α−1}t·∫_L^∞ e^{−a x^α t}·₁F₁(−1/α; 2; at(x^α+kαt−y^α))·u0(y) dy ],
/// ```
///
/// with `S = 1 + kαt/x^α` and `L = (x^α + kαt)^{1/α}`, and `u(x,t) = 0`
/// beyond the limiting characteristic `x^α ≤ −kαt` (reachable only for
/// α < 0; for α > 0 every point keeps a pre-image under the flow).
pub fn solve_constant_decay(
    d: &DerivedParams,
    u0: &SampledDensity,
    x: f64,
    t: f64,
) -> Result<f64, ConstantError> {
    let ctx = ConstCtx::new(d)?;
    ctx.require_mode(d, Mode::Decay)?;
    require(x.is_finite() && x > 0.0, "x", "must be finite and positive")?;
    require(
        t.is_finite() && t >= 0.0,
        "t",
        "must be finite and nonnegative",
    )?;
    if t == 0.0 {
        return Ok(u0.eval(x));
    }
    let (alpha, k, a) = (ctx.alpha, ctx.k, ctx.a);
    let xa = x.powf(alpha);
    let base = xa + k * alpha * t;
    if base <= 0.0 {
        return Ok(0.0);
    }
    let damp = -0.5 * k * a * alpha * t * t;
    if damp > MAX_EXP {
        return Err(ConstantError::Overflow { exponent: damp });
    }

    // Transported term; evaluate u0 first so that a vanishing profile at the
    // (possibly enormous) source point never multiplies an overflowing power.
    let shift = base / xa;
    let source = x * shift.powf(1.0 / alpha);
    let u0_at_source = u0.eval(source);
    let transported = if u0_at_source == 0.0 {
        0.0
    } else {
        (-a * xa * t).exp() * shift.powf((1.0 - alpha) / alpha) * u0_at_source
    };

    // Fragmentation gain from parents above the flow pre-image L.
    let grid = u0.grid();
    let hi = *grid.last().unwrap();
    let lo = base.powf(1.0 / alpha).max(grid[0]);
    let mut gain = 0.0;
    if hi > lo {
        let mut breaks = vec![lo];
        breaks.extend(grid.iter().copied().filter(|&b| b > lo && b < hi));
        breaks.push(hi);
        let c = (alpha + 1.0) / alpha;
        let q = a * t;
        let integral = integrate_cells_checked(
            |y| Ok(damped_kummer(c, q, xa, y.powf(alpha) - k * alpha * t)? * u0.eval(y)),
            &breaks,
        )?;
        gain = a * (alpha + 1.0) * x.powf(alpha - 1.0) * t * integral;
    }
    Ok(damp.exp() * (transported + gain))
}

/// Snapshot at time `t` of the decay solution grown from a unit point mass
/// at `x0`.
///
/// The Dirac rides the characteristic to `(x0^α − kαt)^{1/α}` with weight
/// `e^{½kaαt² − a x0^α t}`; the regular fragment density lives below it:
///
/// ```text
/// u_reg(x) = e^{−½kaαt²}·a(α+1)·x^{α−1}·t·e^{−a x^α t}·
///            ₁F₁(−1/α; 2; at(x^α + kαt − x0^α)),    0 < x < location.
/// ```
///
/// Past extinction (`x0^α < kαt`, reachable only for α > 0) the snapshot is
/// identically zero — a first-class state, not an error.
pub fn solve_constant_decay_monodisperse(
    d: &DerivedParams,
    x0: f64,
    t: f64,
) -> Result<DensitySnapshot, ConstantError> {
    let ctx = ConstCtx::new(d)?;
    ctx.require_mode(d, Mode::Decay)?;
    require(
        x0.is_finite() && x0 > 0.0,
        "x0",
        "must be finite and positive",
    )?;
    require(
        t.is_finite() && t >= 0.0,
        "t",
        "must be finite and nonnegative",
    )?;
    if t == 0.0 {
        return Ok(DensitySnapshot::new(
            0.0,
            Some(DiracComponent {
                location: x0,
                weight: 1.0,
            }),
            (0.0, 0.0),
            |_| 0.0,
        ));
    }
    let (alpha, k, a) = (ctx.alpha, ctx.k, ctx.a);
    let base = x0.powf(alpha) - k * alpha * t;
    if base <= 0.0 {
        return Ok(DensitySnapshot::zero(t));
    }
    let damp = -0.5 * k * a * alpha * t * t;
    if damp > MAX_EXP {
        return Err(ConstantError::Overflow { exponent: damp });
    }
    let location = base.powf(1.0 / alpha);
    let weight = (damp - a * base * t).exp();
    let c = (alpha + 1.0) / alpha;
    let q = a * t;
    let scale = damp.exp() * a * (alpha + 1.0) * t;
    let regular = move |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        // damped_kummer only fails on non-finite input here; surface that
        // as NaN rather than silently dropping density.
        match damped_kummer(c, q, x.powf(alpha), base) {
            Ok(v) => scale * x.powf(alpha - 1.0) * v,
            Err(_) => f64::NAN,
        }
    };
    Ok(DensitySnapshot::new(
        t,
        Some(DiracComponent { location, weight }),
        (0.0, location),
        regular,
    ))
}

/// Closed-form moment `M_p(t) = ∫ x^p·u(x,t) dx` of the monodisperse decay
/// solution.
///
/// * α > 0, p ≥ 0:
///   `e^{−½kaαt²}·(x0^α−kαt)^{p/α}·₁F₁((p−1)/α; (p+α)/α; −at(x0^α−kαt))`,
///   and 0 past extinction;
/// * α ∈ (−1, 0), p > 1+α:
///   `Γ((α−p+1)/α)/Γ(−p/α)·e^{½kaαt²−a x0^α t}·(x0^α−kαt)^{p/α}·
///    Ψ((α+1)/α; (α+p)/α; at(x0^α−kαt))`,
///   which for p = 1 reduces to the transport mass times the regularized
///   upper Γ — strictly smaller than transport alone: shattering.
///
/// Orders outside those ranges make the integral diverge and are rejected.
pub fn moments_constant_decay(
    d: &DerivedParams,
    p: f64,
    t: f64,
    x0: f64,
) -> Result<f64, ConstantError> {
    let ctx = ConstCtx::new(d)?;
    ctx.require_mode(d, Mode::Decay)?;
    require(p.is_finite(), "p", "must be finite")?;
    require(
        x0.is_finite() && x0 > 0.0,
        "x0",
        "must be finite and positive",
    )?;
    require(
        t.is_finite() && t >= 0.0,
        "t",
        "must be finite and nonnegative",
    )?;
    let alpha = ctx.alpha;
    if alpha > 0.0 {
        if p < 0.0 {
            return Err(ConstantError::InadmissibleMoment {
                p,
                reason: "negative orders diverge against the fragment density for α > 0".into(),
            });
        }
    } else if p <= 1.0 + alpha {
        return Err(ConstantError::InadmissibleMoment {
            p,
            reason: format!(
                "the fragment density needs p > 1 + α = {} when α < 0",
                1.0 + alpha
            ),
        });
    }
    if t == 0.0 {
        return Ok(x0.powf(p));
    }
    let base = x0.powf(alpha) - ctx.k * alpha * t;
    if base <= 0.0 {
        return Ok(0.0);
    }
    let z = ctx.a * t * base;
    let damp = -0.5 * ctx.k * ctx.a * alpha * t * t;
    let result = if alpha > 0.0 {
        damp.exp() * base.powf(p / alpha) * kummer_neg((p - 1.0) / alpha, (p + alpha) / alpha, z)?
    } else {
        let expo = -damp - ctx.a * x0.powf(alpha) * t;
        let lg = ln_gamma((alpha - p + 1.0) / alpha) - ln_gamma(-p / alpha);
        (lg + expo).exp()
            * base.powf(p / alpha)
            * tricomi_psi((alpha + 1.0) / alpha, (alpha + p) / alpha, z)?
    };
    if !result.is_finite() {
        return Err(ConstantError::Overflow { exponent: damp });
    }
    Ok(result)
}

/// Mass that the size flow alone would retain from a unit point mass at
/// `x0`: `e^{−½kaαt²}·(x0^α − kαt)^{1/α}` (0 past extinction).
///
/// For α > 0 the true first moment equals this exactly (mass conservation
/// up to extinction); for α < 0 the true moment falls strictly below it —
/// the gap is the shattering diagnostic.
pub fn transport_mass_prediction(
    d: &DerivedParams,
    t: f64,
    x0: f64,
) -> Result<f64, ConstantError> {
    let ctx = ConstCtx::new(d)?;
    ctx.require_mode(d, Mode::Decay)?;
    require(
        x0.is_finite() && x0 > 0.0,
        "x0",
        "must be finite and positive",
    )?;
    require(
        t.is_finite() && t >= 0.0,
        "t",
        "must be finite and nonnegative",
    )?;
    let base = x0.powf(ctx.alpha) - ctx.k * ctx.alpha * t;
    if base <= 0.0 {
        return Ok(0.0);
    }
    let damp = -0.5 * ctx.k * ctx.a * ctx.alpha * t * t;
    if damp > MAX_EXP {
        return Err(ConstantError::Overflow { exponent: damp });
    }
    Ok(damp.exp() * base.powf(1.0 / ctx.alpha))
}

// ---------------------------------------------------------------------------
// Growth/decay in the transformed plane: operator powers at a point
// ---------------------------------------------------------------------------

/// Transformed-plane density `w(ξ, t)` from initial data alone, for any
/// constant-class parameter set.
///
/// The operator direction is the sign of α: for α > 0 this is
/// `(I + tJ⁺)^m[v0](ξ)` (binomial expansion for integer m, kernel series
/// otherwise); for α < 0 it is `(I − tJ⁻)^{−m}[v0](ξ)` with `w ≡ 0` on
/// `ξ ≤ 0` (the zero extension). In the boundary-required growth case this
/// is the correct evaluation only for `ξ ≥ 0`; use
/// [`solve_constant_growth_boundary`] to cover `ξ < 0` there.
pub fn solve_constant_growth_interior(
    d: &DerivedParams,
    v0: &GridFunction,
    xi: f64,
    t: f64,
) -> Result<f64, ConstantError> {
    let ctx = ConstCtx::new(d)?;
    require(xi.is_finite(), "xi", "must be finite")?;
    require(
        t.is_finite() && t >= 0.0,
        "t",
        "must be finite and nonnegative",
    )?;
    if t == 0.0 {
        return Ok(v0.eval(xi));
    }
    match Direction::from_sign(d.sg) {
        Direction::Plus => match integer_order(ctx.m) {
            Some(mi) => binomial_interior_at(v0, t, mi, xi),
            None => series_interior_at(v0, t, ctx.m, Direction::Plus, xi),
        },
        Direction::Minus => {
            if xi <= 0.0 {
                return Ok(0.0);
            }
            match integer_order(ctx.m) {
                Some(mi) => resolvent_interior_at(v0, t, mi, xi),
                None => series_interior_at(v0, t, ctx.m, Direction::Minus, xi),
            }
        }
    }
}

/// `(I + tJ⁺)^m[v0](ξ)` by the binomial expansion, integer `m`.
fn binomial_interior_at(
    v0: &GridFunction,
    t: f64,
    m: u32,
    xi: f64,
) -> Result<f64, ConstantError> {
    let mut acc = v0.eval(xi);
    let mut coeff = 1.0;
    for n in 1..=m {
        coeff = coeff * f64::from(m - n + 1) / f64::from(n);
        acc += coeff * t.powi(n as i32) * j_power_at(v0, n, Direction::Plus, xi)?;
    }
    Ok(acc)
}

/// `(I − tJ⁻)^{−m}[v0](ξ)` for integer `m` at one point, by the expansion
/// `v0(ξ) + Σ_{n=1}^m C(m,n)·tⁿ/(n−1)!·∫₀^ξ e^{t(ξ−σ)}(ξ−σ)^{n−1}v0(σ)dσ`.
fn resolvent_interior_at(
    v0: &GridFunction,
    t: f64,
    m: u32,
    xi: f64,
) -> Result<f64, ConstantError> {
    let grid = v0.grid();
    let lo = grid[0];
    if xi <= lo {
        return Ok(v0.eval(xi));
    }
    let rate_span = t * (xi - lo);
    if rate_span > MAX_EXP {
        return Err(ConstantError::Overflow {
            exponent: rate_span,
        });
    }
    let top = xi.min(*grid.last().unwrap());
    let mut breaks: Vec<f64> = vec![lo];
    breaks.extend(grid.iter().copied().filter(|&b| b > lo && b < top));
    breaks.push(top);
    let mut acc = v0.eval(xi);
    let mut choose = 1.0;
    for n in 1..=m {
        choose = choose * f64::from(m - n + 1) / f64::from(n);
        let coeff = choose * t.powi(n as i32) / factorial((n - 1) as usize);
        let pw = (n - 1) as i32;
        let integral = gauss::integrate_cells(
            |sigma: f64| (t * (xi - sigma)).exp() * (xi - sigma).powi(pw) * v0.eval(sigma),
            &breaks,
        );
        acc += coeff * integral;
    }
    Ok(acc)
}

/// Kernel-series evaluation `v0(ξ) + t·∫ F(±t(η−ξ))·v0(η) dη` at one point,
/// for non-integer `m` (either direction).
fn series_interior_at(
    v0: &GridFunction,
    t: f64,
    m: f64,
    direction: Direction,
    xi: f64,
) -> Result<f64, ConstantError> {
    let phi = match direction {
        Direction::Plus => PhiKernel::ExpNeg,
        Direction::Minus => PhiKernel::ExpPos,
    };
    let kernel = build_kernel(phi, m)?;
    let grid = v0.grid();
    let (lo, hi) = (grid[0], *grid.last().unwrap());
    let dsg = direction.sign();
    let mut breaks: Vec<f64> = Vec::new();
    match direction {
        Direction::Plus => {
            if xi >= hi {
                return Ok(v0.eval(xi));
            }
            breaks.push(xi);
            breaks.extend(grid.iter().copied().filter(|&g| g > xi));
        }
        Direction::Minus => {
            if xi <= lo {
                return Ok(v0.eval(xi));
            }
            breaks.push(lo);
            breaks.extend(grid.iter().copied().filter(|&g| g > lo && g < xi));
            breaks.push(xi);
        }
    }
    // Probe the largest kernel argument once so a validity-radius failure
    // surfaces as an error, not inside the quadrature closure.
    let z_max = match direction {
        Direction::Plus => t * (hi - xi),
        Direction::Minus => t * (xi - lo),
    };
    kernel.eval_f(z_max.max(0.0))?;
    let mut err: Option<OperatorError> = None;
    let integral = gauss::integrate_cells(
        |eta: f64| match kernel.eval_f(dsg * t * (eta - xi)) {
            Ok(fv) => fv * v0.eval(eta),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        &breaks,
    );
    match err {
        Some(e) => Err(e.into()),
        None => Ok(v0.eval(xi) + t * integral),
    }
}

// ---------------------------------------------------------------------------
// Growth with positive drift: the boundary-determined case
// ---------------------------------------------------------------------------

/// First `count` moments `μ_j = ∫ η^j·v0(η) dη` of a grid profile.
fn profile_moments(v0: &GridFunction, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| gauss::integrate_cells(|eta: f64| eta.powi(j as i32) * v0.eval(eta), v0.grid()))
        .collect()
}

/// `Σ_{n=1}^m C(m,n)·tⁿ·d^{n−1}/(n−1)!` — the integral kernel of
/// `(I + tJ)^m` on the inflow half-line, `J[f](ξ) = ∫_ξ^0 f`.
fn inflow_kernel(m: u32, t: f64, d: f64) -> f64 {
    let mut sum = 0.0;
    let mut choose = 1.0;
    for n in 1..=m {
        choose = choose * f64::from(m - n + 1) / f64::from(n);
        sum += choose * t.powi(n as i32) * d.powi(n as i32 - 1) / factorial((n - 1) as usize);
    }
    sum
}

/// Transformed-plane density for boundary-required growth (`β > 0`, α > 0).
///
/// For `ξ ≥ 0` this delegates to [`solve_constant_growth_interior`]; for
/// `ξ < 0` it evaluates
///
/// ```text
/// w⁺(ξ, t) = F(ξ, t) + (I + tJ)^m[ψ](ξ)
///          = F(ξ, t) + ψ(ξ) + ∫_ξ^0 K(σ−ξ)·ψ(σ) dσ,
/// ```
///
/// with the moment polynomial `F`, the extension `ψ` from
/// [`boundary_correction`], and `K` per [`inflow_kernel`]. The construction
/// makes `w⁺(ξ, −ξ/β) = 0` along the boundary characteristic.
pub fn solve_constant_growth_boundary(
    d: &DerivedParams,
    v0: &GridFunction,
    xi: f64,
    t: f64,
) -> Result<f64, ConstantError> {
    let ctx = ConstCtx::new(d)?;
    ctx.require_mode(d, Mode::Growth)?;
    if ctx.beta <= 0.0 {
        return Err(ConstantError::InvalidArgument {
            name: "params",
            reason: format!(
                "the boundary case needs positive drift, got β = {}",
                ctx.beta
            ),
        });
    }
    require(xi.is_finite(), "xi", "must be finite")?;
    require(
        t.is_finite() && t >= 0.0,
        "t",
        "must be finite and nonnegative",
    )?;
    if xi >= 0.0 {
        return solve_constant_growth_interior(d, v0, xi, t);
    }
    let mi = integer_order(ctx.m).ok_or_else(|| ConstantError::Unsupported {
        reason: format!(
            "the boundary construction needs an integer kernel order, got m = {}",
            ctx.m
        ),
    })?;
    let moments = profile_moments(v0, mi as usize);
    let bc = boundary_correction(mi, ctx.beta, &moments)?;
    let cells = ((-xi) / 0.25).ceil().max(1.0) as usize;
    let breaks: Vec<f64> = (0..=cells)
        .map(|n| xi - xi * n as f64 / cells as f64)
        .collect();
    let integral = gauss::integrate_cells(
        |sigma: f64| inflow_kernel(mi, t, sigma - xi) * bc.psi(sigma),
        &breaks,
    );
    Ok(bc.moment_polynomial(xi, t) + bc.psi(xi) + integral)
}

/// Physical-plane density `u(x, t)` for constant-class growth from sampled
/// data: pushforward to the transformed plane, operator evaluation
/// (boundary-aware when β > 0), then the back-transform
/// `u = (a x^α)^{ν/α}·e^{−βt²/2 − ξt}·w(ξ, t)` along `ξ = a x^α − βt`.
pub fn solve_constant_growth(
    d: &DerivedParams,
    u0: &SampledDensity,
    x: f64,
    t: f64,
) -> Result<f64, ConstantError> {
    let ctx = ConstCtx::new(d)?;
    ctx.require_mode(d, Mode::Growth)?;
    require(x.is_finite() && x > 0.0, "x", "must be finite and positive")?;
    require(
        t.is_finite() && t >= 0.0,
        "t",
        "must be finite and nonnegative",
    )?;
    if t == 0.0 {
        return Ok(u0.eval(x));
    }
    let v0 = match pushforward_initial(&InitialCondition::Sampled(u0.clone()), &d.params)? {
        TransformedInitial::Sampled(g) => g,
        TransformedInitial::Dirac { .. } => unreachable!("sampled data maps to a sampled profile"),
    };
    let xi = characteristic_maps(d).xi(x, t)?;
    let w = if ctx.beta > 0.0 {
        solve_constant_growth_boundary(d, &v0, xi, t)?
    } else {
        solve_constant_growth_interior(d, &v0, xi, t)?
    };
    let expo = -0.5 * ctx.beta * t * t - xi * t;
    if expo > MAX_EXP {
        return Err(ConstantError::Overflow { exponent: expo });
    }
    let z = ctx.a * x.powf(ctx.alpha);
    Ok(z.powf(ctx.nu / ctx.alpha) * expo.exp() * w)
}
