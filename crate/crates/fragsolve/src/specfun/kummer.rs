//! Confluent hypergeometric function ₁F₁(a; b; z) (Kummer's M).
//!
//! Evaluation strategy, in order:
//!
//! 1. `a` a non-positive integer −n: the series terminates; sum the n+1
//!    terms directly (exact polynomial, any sign of z, no cancellation —
//!    for z < 0 the terms are all of one sign).
//! 2. `z ≥ 0`: Maclaurin series. All series terms are eventually positive,
//!    so plain summation is stable.
//! 3. `z < 0`: Kummer transform ₁F₁(a;b;z) = e^z ₁F₁(b−a;b;−z), which moves
//!    the argument to the stable half-axis.
//!
//! The series stops once three consecutive terms are below 1e-16 of the
//! running sum (two consecutive small terms can be a fluke when a ≈ −n makes
//! a coefficient pass near zero).

use super::gamma::gamma;
use super::SpecFunError;

/// Maximum number of series terms before reporting a convergence failure.
const MAX_TERMS: usize = 600;
/// Relative size under which a term counts as negligible.
const TERM_EPS: f64 = 1e-16;
/// How many consecutive negligible terms stop the series.
const QUIET_TERMS: usize = 3;

/// ₁F₁(a; b; z) = Σₙ (a)ₙ/(b)ₙ · zⁿ/n!.
///
/// Errors when `b` is a non-positive integer (poles of the function), when
/// the series fails to converge, or when the result overflows f64.
pub fn kummer_1f1(a: f64, b: f64, z: f64) -> Result<f64, SpecFunError> {
    if b <= 0.0 && b == b.floor() {
        return Err(SpecFunError::Domain {
            func: "kummer_1f1",
            reason: format!("b = {b} is a non-positive integer"),
        });
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(SpecFunError::Domain {
            func: "kummer_1f1",
            reason: "non-finite argument".into(),
        });
    }
    // Terminating case: a = −n exactly.
    if a <= 0.0 && a == a.floor() {
        return polynomial(a, b, z);
    }
    if z >= 0.0 {
        return kummer_1f1_series(a, b, z);
    }
    // Kummer transform onto the positive axis.
    let ez = z.exp();
    let transformed = if b - a <= 0.0 && (b - a) == (b - a).floor() {
        polynomial(b - a, b, -z)?
    } else {
        kummer_1f1_series(b - a, b, -z)?
    };
    let result = ez * transformed;
    if !result.is_finite() {
        return Err(SpecFunError::Overflow { func: "kummer_1f1" });
    }
    Ok(result)
}

/// Plain Maclaurin series for ₁F₁, with no argument reduction.
///
/// Exposed as the raw building block so tests can pit the series directly
/// against the transformed route in regimes where both are stable; for
/// negative z of large magnitude prefer [`kummer_1f1`], which avoids the
/// catastrophic cancellation this series suffers there.
pub fn kummer_1f1_series(a: f64, b: f64, z: f64) -> Result<f64, SpecFunError> {
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    let mut quiet = 0usize;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * z / (nf + 1.0);
        sum += term;
        if !sum.is_finite() {
            return Err(SpecFunError::Overflow {
                func: "kummer_1f1_series",
            });
        }
        if term.abs() <= TERM_EPS * sum.abs().max(f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet >= QUIET_TERMS {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(SpecFunError::Convergence {
        func: "kummer_1f1_series",
        terms: MAX_TERMS,
    })
}

/// Where the convergent series hands over to the large-argument expansion.
/// Must stay well below the series' term budget (the transformed series at
/// argument w needs ≈ w + 10√w terms); at 200 the truncated expansion is
/// already accurate to ~1e-19.
const KUMMER_ASYMPTOTIC_CUT: f64 = 200.0;

/// `₁F₁(a; b; −w)` for `w ≥ 0`, valid for arbitrarily large `w`.
///
/// Below [`KUMMER_ASYMPTOTIC_CUT`] this is [`kummer_1f1`]; above it the
/// Poincaré expansion `Γ(b)/Γ(b−a)·w^{−a}·Σ_j (a)_j(a−b+1)_j/(j!·wʲ)` is
/// summed to its smallest term (relative error ≤ 1e-20 there). At a pole of
/// `Γ(b−a)` the algebraic branch vanishes and the remainder is exponentially
/// small, so 0 is returned.
pub fn kummer_neg(a: f64, b: f64, w: f64) -> Result<f64, SpecFunError> {
    debug_assert!(w >= 0.0);
    if a == 0.0 {
        return Ok(1.0);
    }
    if w <= KUMMER_ASYMPTOTIC_CUT {
        return kummer_1f1(a, b, -w);
    }
    let lead = gamma(b) / gamma(b - a);
    if !lead.is_finite() {
        return Ok(0.0);
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for j in 0..12 {
        let jf = j as f64;
        let next = term * (a + jf) * (a - b + 1.0 + jf) / ((jf + 1.0) * w);
        if next.abs() >= term.abs() {
            break;
        }
        sum += next;
        term = next;
    }
    Ok(lead * w.powf(-a) * sum)
}

/// The damped product `e^{−q·xª}·₁F₁(1−c; 2; −q·(yª − xª))` evaluated on
/// whichever side of the Kummer transformation keeps the argument negative:
/// for `yª < xª` the transformation moves the exponential onto `yª`, giving
/// `e^{−q·yª}·₁F₁(1+c; 2; −q·(xª − yª))`. Both factors are then bounded.
pub fn damped_kummer(c: f64, q: f64, x_alpha: f64, y_alpha: f64) -> Result<f64, SpecFunError> {
    let w = q * (y_alpha - x_alpha);
    if w >= 0.0 {
        Ok((-q * x_alpha).exp() * kummer_neg(1.0 - c, 2.0, w)?)
    } else {
        Ok((-q * y_alpha).exp() * kummer_neg(1.0 + c, 2.0, -w)?)
    }
}

/// Terminating series for a = −n: exactly n+1 terms.
fn polynomial(a: f64, b: f64, z: f64) -> Result<f64, SpecFunError> {
    let n = (-a) as usize;
    let mut sum = 1.0f64;
    let mut term = 1.0f64;
    for j in 0..n {
        let jf = j as f64;
        term *= (a + jf) / (b + jf) * z / (jf + 1.0);
        sum += term;
    }
    if !sum.is_finite() {
        return Err(SpecFunError::Overflow { func: "kummer_1f1" });
    }
    Ok(sum)
}
