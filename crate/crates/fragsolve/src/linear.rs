//! Closed-form solutions for the linear-transport class (`γ = 1`): densities
//! for general and monodisperse data, their moments, the pure-fragmentation
//! kernel in rescaled variables, and the mass-amplifying non-unique solution
//! family together with a finite-difference defect diagnostic for it.
//!
//! Every formula is written against the transport sign `s` (+1 growth,
//! −1 decay) and the two nonnegative damping amplitudes
//!
//! ```text
//! q(t) = s·(a/(kα))·(1 − e^{−s·kαt}),      Q(t) = q(t)·e^{s·kαt},
//! ```
//!
//! which stay positive in all four sign configurations (s = ±1, sign α = ±1).
//! Each Kummer factor is paired with the exponential that damps it before
//! anything is evaluated, so densities and moments remain inside the f64
//! range even when the raw transport amplification `e^{s·kαt}` is astronomical.

use crate::grid::{adaptive_quadrature, gauss, QuadratureError};
use crate::model::{
    DensitySnapshot, DerivedParams, DiracComponent, ModelError, ParamClass, SampledDensity,
};
use crate::operators::Direction;
use crate::specfun::{damped_kummer, kummer_1f1, kummer_neg, ln_gamma, SpecFunError};

/// Failures of the linear-class closed forms.
#[derive(Debug, thiserror::Error)]
pub enum LinearError {
    /// The parameters do not belong to the linear class (`γ = 1`).
    #[error("parameters are in the {found:?} class; this solver requires the linear class")]
    ClassMismatch { found: ParamClass },
    /// A scalar argument is outside its domain.
    #[error("invalid argument {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    /// The requested moment order makes the moment integral divergent.
    #[error("moment order p = {p} is inadmissible: {reason}")]
    InadmissibleMoment { p: f64, reason: String },
    /// An exponential amplification factor left the f64 range.
    #[error("amplification exponent {exponent} exceeds the floating-point range")]
    Overflow { exponent: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

fn require(ok: bool, name: &'static str, reason: &str) -> Result<(), LinearError> {
    if ok {
        Ok(())
    } else {
        Err(LinearError::InvalidArgument {
            name,
            reason: reason.to_string(),
        })
    }
}

/// Raw constants of one solve, extracted after the class check.
#[derive(Clone, Copy)]
struct LinCtx {
    /// Transport sign: +1 growth, −1 decay.
    s: f64,
    alpha: f64,
    nu: f64,
    k: f64,
    a: f64,
    /// `(ν+2)/α` — the recurring hypergeometric parameter.
    c: f64,
}

impl LinCtx {
    fn new(d: &DerivedParams) -> Result<Self, LinearError> {
        if d.class != ParamClass::Linear {
            return Err(LinearError::ClassMismatch { found: d.class });
        }
        let p = d.params;
        Ok(Self {
            s: p.mode.sign(),
            alpha: p.alpha,
            nu: p.nu,
            k: p.k,
            a: p.a,
            c: (p.nu + 2.0) / p.alpha,
        })
    }

    /// `q(t) = s·(a/(kα))·(1 − e^{−s·kαt}) ≥ 0`.
    fn q(&self, t: f64) -> f64 {
        -self.s * self.a * (-self.s * self.k * self.alpha * t).exp_m1() / (self.k * self.alpha)
    }

    /// `Q(t) = s·(a/(kα))·(e^{s·kαt} − 1) = q(t)·e^{s·kαt} ≥ 0`.
    fn big_q(&self, t: f64) -> f64 {
        self.s * self.a * (self.s * self.k * self.alpha * t).exp_m1() / (self.k * self.alpha)
    }
}

/// Runs a Gauss–Legendre pass over `breaks`, routing errors raised inside the
/// integrand closure back out (the quadrature itself is infallible).
fn integrate_cells_checked(
    mut f: impl FnMut(f64) -> Result<f64, LinearError>,
    breaks: &[f64],
) -> Result<f64, LinearError> {
    let mut err: Option<LinearError> = None;
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

/// Density at `(x, t)` evolved from sampled initial data.
///
/// The closed form transports the initial profile along `x ↦ x·e^{−s·kt}`
/// and adds the fragmentation repopulation integral
///
/// ```text
/// u(x,t) = e^{−s·kt} [ e^{−q·xª} u₀(x·e^{−s·kt})
///          + (ν+2)·q·x^ν ∫ₓ^∞ e^{−q·xª}·₁F₁(1−c; 2; −q(yª−xª))·y^{α−ν−1} u₀(y·e^{−s·kt}) dy ],
/// ```
///
/// with `c = (ν+2)/α`. The integral is taken cell-by-cell over the sampled
/// grid transported to time `t`, so the interpolant's kinks never cross a
/// quadrature panel.
pub fn solve_linear(
    d: &DerivedParams,
    u0: &SampledDensity,
    x: f64,
    t: f64,
) -> Result<f64, LinearError> {
    let ctx = LinCtx::new(d)?;
    require(x.is_finite() && x > 0.0, "x", "must be finite and positive")?;
    require(t.is_finite() && t >= 0.0, "t", "must be finite and nonnegative")?;
    if t == 0.0 {
        return Ok(u0.eval(x));
    }

    let scale = (ctx.s * ctx.k * t).exp();
    let q = ctx.q(t);
    let xa = x.powf(ctx.alpha);
    let transported = (-q * xa).exp() * u0.eval(x / scale);

    // Repopulation integral over the transported support of u0, clipped to
    // y > x; cell boundaries are the transported sample nodes.
    let lo = x.max(u0.grid()[0] * scale);
    let hi = u0.grid()[u0.grid().len() - 1] * scale;
    let mut repopulation = 0.0;
    if hi > lo {
        let mut breaks: Vec<f64> = vec![lo];
        breaks.extend(
            u0.grid()
                .iter()
                .map(|g| g * scale)
                .filter(|&g| g > lo && g < hi),
        );
        breaks.push(hi);
        let integral = integrate_cells_checked(
            |y| {
                let ya = y.powf(ctx.alpha);
                Ok(damped_kummer(ctx.c, q, xa, ya)?
                    * y.powf(ctx.alpha - ctx.nu - 1.0)
                    * u0.eval(y / scale))
            },
            &breaks,
        )?;
        repopulation = (ctx.nu + 2.0) * q * x.powf(ctx.nu) * integral;
    }

    Ok((transported + repopulation) / scale)
}

/// Snapshot of the solution evolved from a unit point mass at `x0`.
///
/// The Dirac component rides the characteristic to `x0·e^{s·kt}` with weight
/// `e^{−Q·x0ª}`; the regular part lives on the fragments—below the
/// transported parent in both α-signs—and reads
///
/// ```text
/// (ν+2)·q·e^{s·kt(α−ν−1)}·x0^{α−ν−1}·x^ν·e^{−q·xª}·₁F₁(1−c; 2; −q(x0ª·e^{s·kαt} − xª)).
/// ```
///
/// Substituting the point mass into the general solution fixes the time
/// prefactor to `e^{s·kt(α−ν−1)}`; with that factor (and only with it) the
/// snapshot's first moment matches the closed-form moment exactly.
pub fn solve_linear_monodisperse(
    d: &DerivedParams,
    x0: f64,
    t: f64,
) -> Result<DensitySnapshot, LinearError> {
    let ctx = LinCtx::new(d)?;
    require(x0.is_finite() && x0 > 0.0, "x0", "must be finite and positive")?;
    require(t.is_finite() && t >= 0.0, "t", "must be finite and nonnegative")?;
    if t == 0.0 {
        let dirac = DiracComponent {
            location: x0,
            weight: 1.0,
        };
        return Ok(DensitySnapshot::new(0.0, Some(dirac), (0.0, 0.0), |_| 0.0));
    }

    let q = ctx.q(t);
    let location = x0 * (ctx.s * ctx.k * t).exp();
    let weight = (-ctx.big_q(t) * x0.powf(ctx.alpha)).exp();
    // Transported parent size raised to α — the upper end of the Kummer
    // argument; equals location^α for either sign of α.
    let parent_alpha = x0.powf(ctx.alpha) * (ctx.s * ctx.k * ctx.alpha * t).exp();
    let amplitude = (ctx.s * ctx.k * t * (ctx.alpha - ctx.nu - 1.0)).exp()
        * (ctx.nu + 2.0)
        * q
        * x0.powf(ctx.alpha - ctx.nu - 1.0);

    let (c, alpha, nu) = (ctx.c, ctx.alpha, ctx.nu);
    let regular = move |x: f64| -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        damped_kummer(c, q, x.powf(alpha), parent_alpha)
            .map(|k| amplitude * x.powf(nu) * k)
            .unwrap_or(f64::NAN)
    };

    Ok(DensitySnapshot::new(
        t,
        Some(DiracComponent { location, weight }),
        (0.0, location),
        regular,
    ))
}

/// `p`-th moment of the monodisperse solution, in closed form.
///
/// For `α > 0` (no shattering) the moment is
/// `e^{s·pkt}·x0^p·₁F₁(b−c; b; −Q·x0ª)` with `b = (p+ν+1)/α`, already in the
/// Kummer-transformed shape whose argument is negative. For `α < 0` it is
///
/// ```text
/// [Γ((α−p+1)/α)/Γ((α−p−ν−1)/α)]·e^{s·pkt − Q·x0ª}·x0^p·Ψ(c; b; Q·x0ª),
/// ```
///
/// with the Γ-ratio evaluated via log-gamma differences (both arguments are
/// positive exactly when the moment converges). Divergent orders — `p+ν+1 ≤ 0`
/// for `α > 0`, `p ≤ 1+α` for `α < 0` — are rejected.
pub fn moment_linear(d: &DerivedParams, p: f64, t: f64, x0: f64) -> Result<f64, LinearError> {
    let ctx = LinCtx::new(d)?;
    require(p.is_finite() && p >= 0.0, "p", "must be finite and nonnegative")?;
    require(x0.is_finite() && x0 > 0.0, "x0", "must be finite and positive")?;
    require(t.is_finite() && t >= 0.0, "t", "must be finite and nonnegative")?;
    if t == 0.0 {
        return Ok(x0.powf(p));
    }

    let b = (p + ctx.nu + 1.0) / ctx.alpha;
    let big_z = ctx.big_q(t) * x0.powf(ctx.alpha);
    let transport = ctx.s * p * ctx.k * t;
    if ctx.alpha > 0.0 {
        if p + ctx.nu + 1.0 <= 0.0 {
            return Err(LinearError::InadmissibleMoment {
                p,
                reason: format!("requires p > −(1+ν) = {}; the integral diverges at x = 0", -(1.0 + ctx.nu)),
            });
        }
        if transport > 700.0 {
            return Err(LinearError::Overflow { exponent: transport });
        }
        Ok(transport.exp() * x0.powf(p) * kummer_neg(b - ctx.c, b, big_z)?)
    } else {
        if p <= 1.0 + ctx.alpha {
            return Err(LinearError::InadmissibleMoment {
                p,
                reason: format!("requires p > 1+α = {}; the moment integral diverges", 1.0 + ctx.alpha),
            });
        }
        let ln_ratio = ln_gamma((ctx.alpha - p + 1.0) / ctx.alpha)
            - ln_gamma((ctx.alpha - p - ctx.nu - 1.0) / ctx.alpha);
        let psi = crate::specfun::tricomi_psi(ctx.c, b, big_z)?;
        Ok((transport - big_z + ln_ratio).exp() * x0.powf(p) * psi)
    }
}

/// Monodisperse solution of the pure fragmentation problem in the rescaled
/// variables `(ξ, τ)`: a point mass at `ξ0` damped by `e^{−τ·ξ0}` plus the
/// fragment density `m·τ·e^{−τ·min(ξ,ξ0)}·₁F₁(1−m; 2; −τ|ξ−ξ0|)`.
///
/// `direction` states which side of the parent the fragments occupy:
/// [`Direction::Plus`] puts them on `(0, ξ0)` (positive rate exponent, mass
/// flows downward), [`Direction::Minus`] on `(ξ0, ∞)`. The two printed forms
/// differ by a Kummer transformation; the damped shape above covers both.
pub fn pure_fragmentation_monodisperse(
    m: f64,
    direction: Direction,
    xi0: f64,
    tau: f64,
) -> Result<DensitySnapshot, LinearError> {
    require(m.is_finite() && m > 0.0, "m", "must be finite and positive")?;
    require(xi0.is_finite() && xi0 > 0.0, "xi0", "must be finite and positive")?;
    require(tau.is_finite() && tau >= 0.0, "tau", "must be finite and nonnegative")?;

    let weight = (-tau * xi0).exp();
    let support = match direction {
        Direction::Plus => (0.0, xi0),
        Direction::Minus => (xi0, f64::INFINITY),
    };
    let regular = move |xi: f64| -> f64 {
        if xi <= 0.0 || tau == 0.0 {
            return 0.0;
        }
        let damped = (-tau * xi.min(xi0)).exp();
        kummer_neg(1.0 - m, 2.0, tau * (xi - xi0).abs())
            .map(|k| m * tau * damped * k)
            .unwrap_or(f64::NAN)
    };

    Ok(DensitySnapshot::new(
        tau,
        Some(DiracComponent {
            location: xi0,
            weight,
        }),
        support,
        regular,
    ))
}

/// Shared validation and kernel pieces of the non-unique family (`α > 0`
/// only). Returns `(ctx, time amplitude, μ-coefficient, xª·e^{−s·kαt})`-style
/// closures' raw ingredients.
fn spurious_ctx(d: &DerivedParams, t: f64) -> Result<(LinCtx, f64), LinearError> {
    let ctx = LinCtx::new(d)?;
    require(
        ctx.alpha > 0.0,
        "alpha",
        "the non-unique solution family exists for positive rate exponents only",
    )?;
    require(t.is_finite() && t >= 0.0, "t", "must be finite and nonnegative")?;
    // Coefficient of μ in the amplification exponent.
    let growth = ctx.s * (ctx.s * ctx.k * ctx.alpha * t).exp_m1() / (ctx.k * ctx.alpha);
    Ok((ctx, growth))
}

/// A member of the non-unique solution family: the superposition
///
/// ```text
/// û(x,t) = x^ν ∫₀^∞ exp{−s·k(ν+1)t + s·(μ/kα)(e^{s·kαt} − 1)}
///                  · (μ/a + xª·e^{−s·kαt})^{−(α+ν+2)/α} · û₀(μ) dμ
/// ```
///
/// over the sampled spectral density `û₀`. These solve the full equation
/// pointwise yet gain mass faster than transport alone allows — see
/// [`spurious_moment`] for the amplified mass and [`spurious_residual`] for
/// an independent finite-difference confirmation that the equation itself is
/// nevertheless satisfied.
pub fn spurious_solution(
    d: &DerivedParams,
    u0_hat: &SampledDensity,
    x: f64,
    t: f64,
) -> Result<f64, LinearError> {
    let (ctx, growth) = spurious_ctx(d, t)?;
    require(x.is_finite() && x > 0.0, "x", "must be finite and positive")?;

    let mu_max = u0_hat.grid()[u0_hat.grid().len() - 1];
    let amp = -ctx.s * ctx.k * (ctx.nu + 1.0) * t;
    let worst = amp + growth * mu_max;
    if worst > 700.0 {
        return Err(LinearError::Overflow { exponent: worst });
    }

    let shift = x.powf(ctx.alpha) * (-ctx.s * ctx.k * ctx.alpha * t).exp();
    let power = (ctx.alpha + ctx.nu + 2.0) / ctx.alpha;
    let integral = integrate_cells_checked(
        |mu| Ok((amp + growth * mu).exp() * (mu / ctx.a + shift).powf(-power) * u0_hat.eval(mu)),
        u0_hat.grid(),
    )?;
    Ok(x.powf(ctx.nu) * integral)
}

/// `p`-th moment of [`spurious_solution`], in closed form:
///
/// ```text
/// M̂_p(t) = (a^{(α+1−p)/α}/α)·B((p+ν+1)/α, (α−p+1)/α)
///          · ∫₀^∞ e^{s·pkt + s·(μ/kα)(e^{s·kαt}−1)} · μ^{(p−1−α)/α} · û₀(μ) dμ,
/// ```
///
/// finite exactly for `−(1+ν) < p < 1+α`. The `e^{s·pkt}` factor is the
/// honest transport prediction; the μ-dependent exponential on top of it is
/// the spurious amplification that rules these solutions out physically.
pub fn spurious_moment(
    d: &DerivedParams,
    u0_hat: &SampledDensity,
    p: f64,
    t: f64,
) -> Result<f64, LinearError> {
    let (ctx, growth) = spurious_ctx(d, t)?;
    require(p.is_finite(), "p", "must be finite")?;
    if p <= -(1.0 + ctx.nu) || p >= 1.0 + ctx.alpha {
        return Err(LinearError::InadmissibleMoment {
            p,
            reason: format!(
                "the family is p-integrable for −(1+ν) = {} < p < 1+α = {}",
                -(1.0 + ctx.nu),
                1.0 + ctx.alpha
            ),
        });
    }

    let mu_max = u0_hat.grid()[u0_hat.grid().len() - 1];
    let transport = ctx.s * p * ctx.k * t;
    let worst = transport + growth * mu_max;
    if worst > 700.0 {
        return Err(LinearError::Overflow { exponent: worst });
    }

    let r = (p + ctx.nu + 1.0) / ctx.alpha;
    let q = (ctx.alpha - p + 1.0) / ctx.alpha;
    let ln_beta = ln_gamma(r) + ln_gamma(q) - ln_gamma(r + q);
    let prefactor = ctx.a.powf((ctx.alpha + 1.0 - p) / ctx.alpha) / ctx.alpha * ln_beta.exp();
    let mu_power = (p - 1.0 - ctx.alpha) / ctx.alpha;
    let integral = integrate_cells_checked(
        |mu| Ok((transport + growth * mu).exp() * mu.powf(mu_power) * u0_hat.eval(mu)),
        u0_hat.grid(),
    )?;
    Ok(prefactor * integral)
}

/// Relative finite-difference defect of [`spurious_solution`] in the full
/// equation
///
/// ```text
/// u_t + s·k·(x·u)_x + a·xª·u − a(ν+2)·x^ν ∫ₓ^∞ y^{α−ν−1} u(y,t) dy = 0.
/// ```
///
/// Time and space derivatives use centered differences; the gain integral is
/// integrated adaptively with its algebraic tail mapped through `y ↦ 1/σ` so
/// the truncation error stays below the reported defect. The return value is
/// `|defect| / max(|term|)`, so values near machine-level FD accuracy (~1e-8)
/// certify that the family genuinely satisfies the equation.
pub fn spurious_residual(
    d: &DerivedParams,
    u0_hat: &SampledDensity,
    x: f64,
    t: f64,
) -> Result<f64, LinearError> {
    let (ctx, _) = spurious_ctx(d, t)?;
    require(x.is_finite() && x > 0.0, "x", "must be finite and positive")?;
    let h_t = 1e-4 * t.max(1.0);
    require(t >= 2.0 * h_t, "t", "must leave room for a centered time difference")?;

    let u = |y: f64, s: f64| spurious_solution(d, u0_hat, y, s);

    let u_t = (u(x, t + h_t)? - u(x, t - h_t)?) / (2.0 * h_t);
    let h_x = 1e-4 * x;
    let flux_x = ((x + h_x) * u(x + h_x, t)? - (x - h_x) * u(x - h_x, t)?) / (2.0 * h_x);
    let here = u(x, t)?;
    let loss = ctx.a * x.powf(ctx.alpha) * here;

    // Gain integral: head on [x, y_split] directly, algebraic tail via the
    // substitution y = 1/σ (integrand ~ y^{−ν−3} makes plain truncation too
    // lossy for a 1e-8-level defect).
    let scale = (u0_hat.grid()[u0_hat.grid().len() - 1] / ctx.a).powf(1.0 / ctx.alpha)
        * (ctx.s * ctx.k * t).exp();
    let y_split = (4.0 * x).max(4.0 * scale).max(1.0);
    let mut err: Option<LinearError> = None;
    let mut integrand = |y: f64| -> f64 {
        match u(y, t) {
            Ok(v) => y.powf(ctx.alpha - ctx.nu - 1.0) * v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    };
    let head = adaptive_quadrature(&mut integrand, x, y_split, 1e-10, 1e-13)?.value;
    let tail = adaptive_quadrature(
        |sigma| {
            if sigma == 0.0 {
                0.0
            } else {
                integrand(1.0 / sigma) / (sigma * sigma)
            }
        },
        0.0,
        1.0 / y_split,
        1e-10,
        1e-13,
    )?
    .value;
    if let Some(e) = err {
        return Err(e);
    }
    let gain = ctx.a * (ctx.nu + 2.0) * x.powf(ctx.nu) * (head + tail);

    let defect = u_t + ctx.s * ctx.k * flux_x + loss - gain;
    let scale = u_t
        .abs()
        .max((ctx.k * flux_x).abs())
        .max(loss.abs())
        .max(gain.abs());
    Ok(defect.abs() / scale)
}
