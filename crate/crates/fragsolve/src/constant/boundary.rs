//! Hermite boundary construction for growth transport with positive drift.
//!
//! When the transformed drift `β` is positive, characteristics enter the
//! physical half-line from `ξ < 0` and the data there is not free: it must be
//! chosen so that the evolved density never develops an inflow the original
//! problem does not have. Matching the first `m` moments
//! `μ_j = ∫₀^∞ η^j w₀(η) dη` of the initial profile pins that extension down
//! uniquely. The construction solved here:
//!
//! 1. the moments define a forcing polynomial `g` of degree `2m−1` with
//!    `g(0) = 0`, the rescaled image of the moment polynomial `F(ξ,t)` along
//!    the boundary characteristic `t = −ξ/β`;
//! 2. the ODE `He_m(d/dζ)[y] = e^{ζ²/2}·g(ζ)` with
//!    `y(0) = y′(0) = … = y^{(m−1)}(0) = 0` is solved by variation of
//!    constants over the basis `e^{λ_i ζ}` built on the (simple, real) roots
//!    `λ_i` of the probabilists' Hermite polynomial `He_m`;
//! 3. the extension is `ψ(ξ) = d^m/dξ^m [e^{−ξ²/(2β)} y(ξ/√β)]` on `ξ < 0`
//!    and `ψ ≡ 0` on `ξ ≥ 0`.
//!
//! The m-fold derivative in step 3 is carried out exactly on the closed
//! representation, never by finite differencing (which loses all accuracy by
//! the second derivative). Writing `ζ = ξ/√β`, every intermediate stays in
//! the algebra spanned by
//!
//! * `p(ζ)·e^{±ζ²/2}` — closed under `d/dζ` (see [`GaussPoly`]), and
//! * `p(ζ)·W_i(ζ)` with
//!   `W_i(ζ) = e^{λ_i ζ − ζ²/2} ∫₀^ζ e^{−λ_i σ + σ²/2} g(σ) dσ`,
//!   whose derivative re-enters the family: `W_i′ = (λ_i − ζ)·W_i + g`.
//!
//! After `m` differentiation steps the result collapses to
//! `ψ(ξ) = β^{−m/2}·[Σ_i p_i(ζ)·W_i(ζ) + free(ζ)]` with polynomial `p_i` and
//! `free`; the recursion reproduces `p_i = He_m(λ_i − ζ)/He_m′(λ_i)` and
//! `free = g` identically, which the tests check coefficient-for-coefficient.
//!
//! `W_i` itself is evaluated through the shifted form
//! `W_i(ζ) = −∫₀^{−ζ} e^{τ(ζ−λ_i) + τ²/2} g(ζ+τ) dτ` (for `ζ ≤ 0`): the
//! exponent is convex in `τ` and its value at both endpoints is at most
//! `max(0, λ_i²/2)`, so the integrand never overflows no matter how negative
//! `ζ` gets.

use crate::grid::gauss;
use crate::specfun::HermiteBasis;

use super::ConstantError;

/// Largest Hermite order the construction accepts. Root separation of
/// `He_m` shrinks and the polynomial degrees (up to `3m−2`) grow with `m`;
/// past this order the closed algebra should move to higher precision.
const MAX_ORDER: u32 = 10;

/// Widest quadrature panel for the `W_i` integrals. The integrand varies on
/// the scale `1/|ζ−λ_i|`; quarter-width panels keep 16-node Gauss–Legendre
/// at rounding accuracy out to `ζ = −25`.
const PANEL_WIDTH: f64 = 0.25;

// --- dense polynomial helpers, coefficients ascending in degree ---

fn p_eval(c: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &ck in c.iter().rev() {
        acc = acc * x + ck;
    }
    acc
}

fn p_derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return Vec::new();
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

fn p_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (o, &v) in out.iter_mut().zip(a) {
        *o = v;
    }
    for (o, &v) in out.iter_mut().zip(b) {
        *o += v;
    }
    out
}

fn p_scale(c: &[f64], s: f64) -> Vec<f64> {
    c.iter().map(|&v| v * s).collect()
}

fn p_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

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

/// A polynomial times a Gaussian factor, `p(ζ)·e^{s·ζ²}` with `s = ±1/2`.
///
/// This family is closed under differentiation,
///
/// ```text
/// d/dζ [p(ζ)·e^{sζ²}] = (p′(ζ) + 2sζ·p(ζ))·e^{sζ²},
/// ```
///
/// which is exactly how the repeated derivatives of the boundary extension
/// are taken: on coefficients, with no numerical differencing anywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussPoly {
    /// Polynomial coefficients, ascending in degree.
    pub poly: Vec<f64>,
    /// Exponent sign `s` in `e^{sζ²}`; must be `+1/2` or `−1/2`.
    pub gauss_sign: f64,
}

impl GaussPoly {
    /// Builds `p(ζ)·e^{sζ²}`, rejecting any `s` other than `±1/2`.
    pub fn new(poly: Vec<f64>, gauss_sign: f64) -> Result<Self, ConstantError> {
        if gauss_sign != 0.5 && gauss_sign != -0.5 {
            return Err(ConstantError::InvalidArgument {
                name: "gauss_sign",
                reason: format!("must be +1/2 or -1/2, got {gauss_sign}"),
            });
        }
        Ok(Self { poly, gauss_sign })
    }

    /// The exact derivative, staying inside the family.
    pub fn derivative(&self) -> Self {
        // 2sζ·p, then add p′.
        let mut shifted = vec![0.0; self.poly.len() + 1];
        for (k, &ck) in self.poly.iter().enumerate() {
            shifted[k + 1] = 2.0 * self.gauss_sign * ck;
        }
        Self {
            poly: p_add(&p_derivative(&self.poly), &shifted),
            gauss_sign: self.gauss_sign,
        }
    }

    /// Value `p(ζ)·e^{sζ²}` at `ζ`.
    pub fn eval(&self, zeta: f64) -> f64 {
        p_eval(&self.poly, zeta) * (self.gauss_sign * zeta * zeta).exp()
    }
}

/// The assembled boundary extension for one `(m, β, moments)` triple.
///
/// Construction happens once in [`boundary_correction`]; afterwards every
/// method is immutable, allocation-light, and safe to call concurrently.
#[derive(Debug, Clone)]
pub struct BoundaryCorrection {
    /// Hermite order: the number of initial-profile moments matched.
    pub m: u32,
    /// Drift rate `β > 0` of the transformed transport.
    pub beta: f64,
    /// Moments `μ_0 … μ_{m−1}` of the transformed initial profile.
    pub moments_w0: Vec<f64>,
    /// Roots `λ_i` of `He_m`, ascending.
    lambda: Vec<f64>,
    /// `He_m′(λ_i)`, matching `lambda` by index.
    he_prime: Vec<f64>,
    /// Coefficients of `He_m`, ascending in degree.
    he_coeffs: Vec<f64>,
    /// Forcing polynomial `g`, degree `2m−1`, `g(0) = 0`.
    g: Vec<f64>,
    /// Outer polynomials `p_i` multiplying `W_i` after `m` derivatives.
    outer: Vec<Vec<f64>>,
    /// Free polynomial left over after `m` derivatives (equals `g`).
    free: Vec<f64>,
    /// Chain polynomials `P_0 … P_m` with `y^{(r)}(0) = P_r(0)`.
    chain: Vec<Vec<f64>>,
}

/// Builds the boundary extension of order `m` for drift `beta` from the
/// first `m` moments of the transformed initial profile.
///
/// Fails when `m` is outside `1..=10`, `beta` is not a positive finite
/// number, or the moment list has the wrong length or non-finite entries.
pub fn boundary_correction(
    m: u32,
    beta: f64,
    moments_w0: &[f64],
) -> Result<BoundaryCorrection, ConstantError> {
    if m == 0 || m > MAX_ORDER {
        return Err(ConstantError::Unsupported {
            reason: format!("boundary construction handles orders 1..={MAX_ORDER}, got m = {m}"),
        });
    }
    if !(beta.is_finite() && beta > 0.0) {
        return Err(ConstantError::InvalidArgument {
            name: "beta",
            reason: format!("the boundary case needs finite β > 0, got {beta}"),
        });
    }
    if moments_w0.len() != m as usize {
        return Err(ConstantError::InvalidArgument {
            name: "moments_w0",
            reason: format!(
                "order m = {m} needs exactly {m} moments, got {}",
                moments_w0.len()
            ),
        });
    }
    if !moments_w0.iter().all(|v| v.is_finite()) {
        return Err(ConstantError::InvalidArgument {
            name: "moments_w0",
            reason: "every moment must be finite".into(),
        });
    }

    let basis = HermiteBasis::new(m as usize)?;
    let lambda = basis.roots().to_vec();
    let he_prime = basis.derivative_at_roots().to_vec();
    let he_coeffs = basis.coefficients().to_vec();

    // Forcing polynomial g(ζ) = −β^{m/2}·F(ζ√β, −ζ/√β): expanding the moment
    // polynomial F, the coefficient of ζ^{2r−1−j} collects
    // (−1)^j β^{(m−1−j)/2} C(m,r) C(r−1,j) μ_j / (r−1)!.
    let mut g = vec![0.0; 2 * m as usize];
    for r in 1..=m {
        for j in 0..r {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            g[(2 * r - 1 - j) as usize] += sign
                * beta.powf(f64::from(m - 1 - j) / 2.0)
                * binomial(m, r)
                * binomial(r - 1, j)
                * moments_w0[j as usize]
                / factorial((r - 1) as usize);
        }
    }

    // m-fold derivative of e^{−ζ²/2}·y over the representation
    // y(ζ) = Σ_i e^{λ_i ζ} E_i(ζ)/He_m′(λ_i): each step maps
    // p_i ↦ p_i′ + (λ_i − ζ)·p_i and free ↦ free′ + Σ_i p_i·g, because
    // d/dζ[p_i·W_i] = (p_i′ + (λ_i−ζ)p_i)·W_i + p_i·g.
    let mut outer: Vec<Vec<f64>> = he_prime.iter().map(|&hp| vec![1.0 / hp]).collect();
    let mut free: Vec<f64> = Vec::new();
    for _ in 0..m {
        let mut next_free = p_derivative(&free);
        for o in &outer {
            next_free = p_add(&next_free, &p_mul(o, &g));
        }
        for (o, &li) in outer.iter_mut().zip(&lambda) {
            let gp = GaussPoly {
                poly: o.clone(),
                gauss_sign: -0.5,
            };
            *o = p_add(&gp.derivative().poly, &p_scale(o, li));
        }
        free = next_free;
    }

    // Derivative chain: y^{(r)}(ζ) = Σ_i λ_i^r e^{λ_i ζ}E_i(ζ)/He_m′(λ_i)
    //                              + e^{ζ²/2}·P_r(ζ)
    // with P_0 = 0 and P_{r+1} = P_r′ + ζ·P_r + s_r·g,
    // s_r = Σ_i λ_i^r / He_m′(λ_i). Since E_i(0) = 0, y^{(r)}(0) = P_r(0).
    let mut chain: Vec<Vec<f64>> = vec![Vec::new()];
    for r in 0..m {
        let s_r: f64 = lambda
            .iter()
            .zip(&he_prime)
            .map(|(&l, &hp)| l.powi(r as i32) / hp)
            .sum();
        let gp = GaussPoly {
            poly: chain[r as usize].clone(),
            gauss_sign: 0.5,
        };
        chain.push(p_add(&gp.derivative().poly, &p_scale(&g, s_r)));
    }

    Ok(BoundaryCorrection {
        m,
        beta,
        moments_w0: moments_w0.to_vec(),
        lambda,
        he_prime,
        he_coeffs,
        g,
        outer,
        free,
        chain,
    })
}

impl BoundaryCorrection {
    /// The moment polynomial
    ///
    /// ```text
    /// F(ξ, t) = Σ_{r=1}^m C(m,r)·tʳ/(r−1)! · Σ_{j=0}^{r−1} C(r−1,j)·(−ξ)^{r−1−j}·μ_j,
    /// ```
    ///
    /// the inhomogeneous part of the extended profile on `ξ < 0`.
    pub fn moment_polynomial(&self, xi: f64, t: f64) -> f64 {
        let mut total = 0.0;
        for r in 1..=self.m {
            let mut inner = 0.0;
            for j in 0..r {
                inner += binomial(r - 1, j)
                    * (-xi).powi((r - 1 - j) as i32)
                    * self.moments_w0[j as usize];
            }
            total += binomial(self.m, r) * t.powi(r as i32) / factorial((r - 1) as usize) * inner;
        }
        total
    }

    /// `W_i(ζ) = e^{λ_i ζ − ζ²/2} ∫₀^ζ e^{−λ_i σ + σ²/2} g(σ) dσ`.
    ///
    /// For `ζ < 0` (the working region) the shifted form
    /// `−∫₀^{−ζ} e^{τ(ζ−λ_i)+τ²/2} g(ζ+τ) dτ` keeps every exponent at or
    /// below `max(0, λ_i²/2)`; small positive `ζ` (diagnostics only) uses the
    /// direct form, harmless there.
    fn w_term(&self, i: usize, zeta: f64) -> f64 {
        let li = self.lambda[i];
        if zeta == 0.0 {
            return 0.0;
        }
        let len = zeta.abs();
        let cells = (len / PANEL_WIDTH).ceil() as usize;
        if zeta < 0.0 {
            let breaks: Vec<f64> = (0..=cells).map(|k| len * k as f64 / cells as f64).collect();
            -gauss::integrate_cells(
                |tau| (tau * (zeta - li) + 0.5 * tau * tau).exp() * p_eval(&self.g, zeta + tau),
                &breaks,
            )
        } else {
            let breaks: Vec<f64> = (0..=cells)
                .map(|k| zeta * k as f64 / cells as f64)
                .collect();
            let integral = gauss::integrate_cells(
                |sigma| (-li * sigma + 0.5 * sigma * sigma).exp() * p_eval(&self.g, sigma),
                &breaks,
            );
            (li * zeta - 0.5 * zeta * zeta).exp() * integral
        }
    }

    /// The extension `ψ(ξ)`: zero for `ξ ≥ 0`, and
    /// `β^{−m/2}·[Σ_i p_i(ζ)·W_i(ζ) + free(ζ)]` at `ζ = ξ/√β` for `ξ < 0`
    /// (the `β^{−m/2}` factor is the chain rule of `d/dξ = β^{−1/2}·d/dζ`
    /// applied `m` times).
    pub fn psi(&self, xi: f64) -> f64 {
        if !xi.is_finite() {
            return f64::NAN;
        }
        if xi >= 0.0 {
            return 0.0;
        }
        let zeta = xi / self.beta.sqrt();
        let mut z = p_eval(&self.free, zeta);
        for i in 0..self.lambda.len() {
            z += p_eval(&self.outer[i], zeta) * self.w_term(i, zeta);
        }
        self.beta.powf(-f64::from(self.m) / 2.0) * z
    }

    /// Residual of the defining ODE `He_m(d/dζ)[y] = e^{ζ²/2}·g(ζ)` at `ζ`,
    /// with the common factor `e^{ζ²/2}` divided out:
    ///
    /// ```text
    /// | Σ_i He_m(λ_i)/He_m′(λ_i)·W_i(ζ) + Σ_{l=0}^m he_l·P_l(ζ) − g(ζ) |.
    /// ```
    ///
    /// Everything here comes from the closed algebra, so the residual
    /// measures only root accuracy and coefficient rounding.
    pub fn hermite_ode_residual(&self, zeta: f64) -> f64 {
        let mut acc = -p_eval(&self.g, zeta);
        for (l, &cl) in self.he_coeffs.iter().enumerate() {
            acc += cl * p_eval(&self.chain[l], zeta);
        }
        for i in 0..self.lambda.len() {
            acc += p_eval(&self.he_coeffs, self.lambda[i]) / self.he_prime[i]
                * self.w_term(i, zeta);
        }
        acc.abs()
    }

    /// `y(0), y′(0), …, y^{(m−1)}(0)`, straight from the representation —
    /// all of them vanish by construction.
    pub fn initial_derivatives(&self) -> Vec<f64> {
        (0..self.m as usize)
            .map(|r| p_eval(&self.chain[r], 0.0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Moments of the unit hat profile on [1/2, 3/2] (peak 1 at 1):
    /// μ_0 = 1/2, μ_1 = 1/2, μ_2 = 25/48, μ_3 = 9/16.
    const HAT_MOMENTS: [f64; 4] = [0.5, 0.5, 25.0 / 48.0, 9.0 / 16.0];

    fn hat_correction(m: u32, beta: f64) -> BoundaryCorrection {
        boundary_correction(m, beta, &HAT_MOMENTS[..m as usize]).unwrap()
    }

    fn rel_close(got: f64, want: f64, tol: f64) {
        let scale = want.abs().max(1e-12);
        assert!(
            (got - want).abs() <= tol * scale,
            "got {got}, want {want} (rel err {})",
            (got - want).abs() / scale
        );
    }

    #[test]
    fn gauss_poly_rejects_other_exponents() {
        assert!(GaussPoly::new(vec![1.0], 0.3).is_err());
        assert!(GaussPoly::new(vec![1.0], 0.5).is_ok());
        assert!(GaussPoly::new(vec![1.0], -0.5).is_ok());
    }

    #[test]
    fn gauss_poly_derivative_matches_finite_differences() {
        let h = 1e-5;
        for sign in [0.5, -0.5] {
            let gp = GaussPoly::new(vec![0.5, -1.2, 0.3, 2.0], sign).unwrap();
            let d = gp.derivative();
            for zeta in [-1.7, -0.4, 0.9] {
                let fd = (gp.eval(zeta + h) - gp.eval(zeta - h)) / (2.0 * h);
                rel_close(d.eval(zeta), fd, 1e-8);
            }
        }
    }

    #[test]
    fn forcing_polynomial_is_rescaled_moment_polynomial() {
        // g(ζ) = −β^{m/2}·F(ζ√β, −ζ/√β) by definition; the assembled
        // coefficients must reproduce that relation pointwise.
        let bc = hat_correction(3, 2.0);
        let sqrt_beta = bc.beta.sqrt();
        for zeta in [-2.3, -1.0, -0.1, 0.7] {
            let direct =
                -bc.beta.powf(1.5) * bc.moment_polynomial(zeta * sqrt_beta, -zeta / sqrt_beta);
            rel_close(p_eval(&bc.g, zeta), direct, 1e-12);
        }
    }

    #[test]
    fn moment_polynomial_reference_value() {
        // m=2, hat moments, F(−2, 1) = 2·1·μ0 + 1·(2μ0 + μ1) = 2.5.
        let bc = hat_correction(2, 1.0);
        rel_close(bc.moment_polynomial(-2.0, 1.0), 2.5, 1e-14);
    }

    #[test]
    fn order_one_extension_is_linear_times_gaussian() {
        // For m = 1 the whole machinery collapses to
        // ψ(ξ) = (μ0/β)·ξ·e^{−ξ²/(2β)}.
        for beta in [1.0, 2.0, 4.0] {
            let bc = boundary_correction(1, beta, &[0.5]).unwrap();
            for xi in [-0.25, -1.0, -2.6] {
                let want = 0.5 / beta * xi * (-xi * xi / (2.0 * beta)).exp();
                rel_close(bc.psi(xi), want, 1e-12);
            }
        }
    }

    #[test]
    fn extension_matches_reference_values() {
        // 30-digit quadrature of the defining m-fold derivative.
        let cases: [(u32, f64, f64, f64); 8] = [
            (1, 1.0, -1.0, -0.303_265_329_856_316_71),
            (1, 1.0, -3.0, -0.016_663_494_807_363_460),
            (2, 1.0, -1.0, -0.824_360_635_350_064_07),
            (2, 1.0, -3.0, 0.334_695_240_222_644_74),
            (3, 1.0, -1.0, -1.644_872_191_309_519_1),
            (3, 1.0, -3.0, 0.958_683_018_407_466_01),
            (2, 2.0, -1.0, -0.473_824_066_056_271_86),
            (2, 2.0, -3.0, 0.062_568_204_679_260_148),
        ];
        for (m, beta, xi, want) in cases {
            let bc = hat_correction(m, beta);
            rel_close(bc.psi(xi), want, 1e-9);
        }
    }

    #[test]
    fn derivative_bookkeeping_reaches_closed_form() {
        // After m steps the recursion must land exactly on
        // p_i(ζ) = He_m(λ_i − ζ)/He_m′(λ_i) and free = g. The polynomials
        // are O(1) on this range, so compare with an absolute floor (the
        // targets pass through exact zeros).
        let close = |got: f64, want: f64| {
            assert!(
                (got - want).abs() <= 1e-10 * want.abs().max(1.0),
                "got {got}, want {want}"
            );
        };
        for m in [1u32, 2, 3] {
            let bc = hat_correction(m, 1.0);
            for zeta in [-2.0, -1.0, -0.5, 0.0, 1.3] {
                close(p_eval(&bc.free, zeta), p_eval(&bc.g, zeta));
                for i in 0..bc.lambda.len() {
                    let want =
                        p_eval(&bc.he_coeffs, bc.lambda[i] - zeta) / bc.he_prime[i];
                    close(p_eval(&bc.outer[i], zeta), want);
                }
            }
        }
    }

    #[test]
    fn order_two_kernel_is_hyperbolic_sine() {
        // For m = 2 the variation-of-constants solution collapses to
        // y(ζ) = ∫₀^ζ sinh(ζ−σ)·e^{σ²/2}·g(σ) dσ; compare the weighted form
        // e^{−ζ²/2}·y(ζ) = Σ_i W_i(ζ)/He₂′(λ_i) against direct quadrature.
        let bc = hat_correction(2, 1.0);
        for zeta in [-0.5f64, -1.5, -3.0] {
            let cells = (zeta.abs() / 0.05).ceil() as usize;
            let breaks: Vec<f64> = (0..=cells)
                .map(|k| zeta * k as f64 / cells as f64)
                .collect();
            let mut rev = breaks.clone();
            rev.reverse();
            let direct = gauss::integrate_cells(
                |sigma: f64| {
                    // e^{−ζ²/2}·sinh(ζ−σ)·e^{σ²/2} with the Gaussians folded
                    // into each exponential, keeping both exponents moderate.
                    let q = 0.5 * (sigma * sigma - zeta * zeta);
                    let half_diff = zeta - sigma;
                    0.5 * ((half_diff + q).exp() - (q - half_diff).exp()) * p_eval(&bc.g, sigma)
                },
                &rev,
            ) * -1.0;
            let weighted: f64 = (0..bc.lambda.len())
                .map(|i| bc.w_term(i, zeta) / bc.he_prime[i])
                .sum();
            rel_close(weighted, direct, 1e-10);
        }
    }

    #[test]
    fn ode_residual_is_rounding_level() {
        for m in [1u32, 2, 3] {
            for beta in [1.0, 2.0] {
                let bc = hat_correction(m, beta);
                for k in 0..=12 {
                    let zeta = -3.0 + 0.25 * f64::from(k);
                    assert!(
                        bc.hermite_ode_residual(zeta) < 1e-10,
                        "m={m} beta={beta} zeta={zeta}: residual {}",
                        bc.hermite_ode_residual(zeta)
                    );
                }
            }
        }
    }

    #[test]
    fn initial_derivatives_vanish() {
        let moments = [0.3, 0.7, 0.9, 1.1, 2.0];
        for m in 1..=5u32 {
            let bc = boundary_correction(m, 1.5, &moments[..m as usize]).unwrap();
            for (r, v) in bc.initial_derivatives().iter().enumerate() {
                assert!(v.abs() < 1e-10, "m={m}: y^({r})(0) = {v}");
            }
        }
    }

    #[test]
    fn zero_profile_gives_zero_extension() {
        let bc = boundary_correction(2, 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(bc.psi(-1.3), 0.0);
        assert_eq!(bc.psi(-0.2), 0.0);
    }

    #[test]
    fn extension_vanishes_on_the_right_half_line() {
        let bc = hat_correction(2, 1.0);
        assert_eq!(bc.psi(0.0), 0.0);
        assert_eq!(bc.psi(1.7), 0.0);
        // Continuity from the left: g(0) = 0 and W_i(0) = 0 force ψ(0⁻) = 0.
        assert!(bc.psi(-1e-8).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_configurations() {
        assert!(matches!(
            boundary_correction(0, 1.0, &[]),
            Err(ConstantError::Unsupported { .. })
        ));
        assert!(matches!(
            boundary_correction(11, 1.0, &[0.0; 11]),
            Err(ConstantError::Unsupported { .. })
        ));
        assert!(matches!(
            boundary_correction(2, -1.0, &[0.5, 0.5]),
            Err(ConstantError::InvalidArgument { .. })
        ));
        assert!(matches!(
            boundary_correction(2, 1.0, &[0.5]),
            Err(ConstantError::InvalidArgument { .. })
        ));
        assert!(matches!(
            boundary_correction(2, 1.0, &[0.5, f64::NAN]),
            Err(ConstantError::InvalidArgument { .. })
        ));
    }
}
