//! Probabilists' Hermite polynomials Heₘ and their roots.
//!
//! Heₘ is monic and satisfies He₀ = 1, He₁ = ζ, Heₙ₊₁ = ζ·Heₙ − n·Heₙ₋₁.
//! Coefficients are built by that recurrence in exact i128 arithmetic (they
//! are integers), so they match the closed form
//! Heₘ(ζ) = m! Σᵢ (−1)ⁱ/(i!(m−2i)!) · ζ^{m−2i}/2ⁱ digit for digit.
//!
//! Roots come from the eigenvalues of the m×m symmetric tridiagonal Jacobi
//! matrix (diagonal 0, off-diagonal √n), polished by one Newton step and
//! symmetrized about 0. They feed the boundary construction for the growth
//! direction, where 1/Heₘ′(root) weights an exponential for each root.

use super::SpecFunError;

/// Largest supported degree (i128 coefficient overflow bound, with margin).
const MAX_DEGREE: usize = 40;
/// Iteration cap for one off-diagonal element in the QL sweep.
const MAX_QL_SWEEPS: usize = 50;

/// A probabilists' Hermite polynomial with precomputed roots.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    m: usize,
    /// Coefficients of Heₘ, lowest degree first (length m+1).
    coeffs: Vec<f64>,
    /// Coefficients of Heₘ₋₁ (length m), used for the derivative.
    coeffs_prev: Vec<f64>,
    /// The m real roots, ascending, symmetric about 0.
    roots: Vec<f64>,
    /// Heₘ′ evaluated at each root.
    derivative_at_roots: Vec<f64>,
}

impl HermiteBasis {
    /// Build Heₘ for 1 ≤ m ≤ 40.
    pub fn new(m: usize) -> Result<Self, SpecFunError> {
        if m == 0 || m > MAX_DEGREE {
            return Err(SpecFunError::Domain {
                func: "HermiteBasis",
                reason: format!("degree must be in 1..={MAX_DEGREE}, got {m}"),
            });
        }
        let (coeffs, coeffs_prev) = integer_coefficients(m);
        let mut roots = jacobi_eigenvalues(m)?;
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // One Newton step against the exact polynomial, then enforce the
        // root set's symmetry about 0 exactly.
        for r in roots.iter_mut() {
            let p = horner(&coeffs, *r);
            let dp = m as f64 * horner(&coeffs_prev, *r);
            if dp != 0.0 {
                *r -= p / dp;
            }
        }
        let n = roots.len();
        for i in 0..n / 2 {
            let v = 0.5 * (roots[n - 1 - i] - roots[i]);
            roots[i] = -v;
            roots[n - 1 - i] = v;
        }
        if n % 2 == 1 {
            roots[n / 2] = 0.0;
        }
        let derivative_at_roots = roots
            .iter()
            .map(|&r| m as f64 * horner(&coeffs_prev, r))
            .collect();
        Ok(Self {
            m,
            coeffs,
            coeffs_prev,
            roots,
            derivative_at_roots,
        })
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Coefficients of Heₘ, constant term first.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// The m roots in ascending order (symmetric about 0).
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// Heₘ′(λᵢ) for each root λᵢ, same order as [`Self::roots`].
    pub fn derivative_at_roots(&self) -> &[f64] {
        &self.derivative_at_roots
    }

    /// Heₘ(ζ).
    pub fn eval(&self, z: f64) -> f64 {
        horner(&self.coeffs, z)
    }

    /// Heₘ′(ζ) = m·Heₘ₋₁(ζ).
    pub fn eval_derivative(&self, z: f64) -> f64 {
        self.m as f64 * horner(&self.coeffs_prev, z)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Coefficients of (Heₘ, Heₘ₋₁) via the exact integer recurrence.
fn integer_coefficients(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut prev: Vec<i128> = vec![1]; // He_0
    let mut cur: Vec<i128> = vec![0, 1]; // He_1
    if m == 1 {
        return (vec![0.0, 1.0], vec![1.0]);
    }
    for n in 1..m {
        // He_{n+1} = ζ·He_n − n·He_{n−1}
        let mut next = vec![0i128; n + 2];
        for (j, &c) in cur.iter().enumerate() {
            next[j + 1] += c;
        }
        for (j, &c) in prev.iter().enumerate() {
            next[j] -= n as i128 * c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    (
        cur.iter().map(|&c| c as f64).collect(),
        prev.iter().map(|&c| c as f64).collect(),
    )
}

/// Eigenvalues of the symmetric tridiagonal Jacobi matrix for the monic
/// Hermite recurrence (diagonal 0, off-diagonals √1 … √(m−1)), by the QL
/// algorithm with implicit shifts.
fn jacobi_eigenvalues(m: usize) -> Result<Vec<f64>, SpecFunError> {
    let mut d = vec![0.0f64; m];
    let mut e: Vec<f64> = (1..m).map(|n| (n as f64).sqrt()).collect();
    e.push(0.0);
    for l in 0..m {
        let mut iter = 0;
        loop {
            // Find a negligible off-diagonal element.
            let mut mm = l;
            while mm < m - 1 {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(SpecFunError::Convergence {
                    func: "HermiteBasis",
                    terms: MAX_QL_SWEEPS,
                });
            }
            // Implicit shift from the 2×2 block at l.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..mm).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    d[l] -= p;
                    e[l] = g;
                    e[mm] = 0.0;
                }
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_match_closed_form() {
        // He_m(ζ) = m! Σ_i (−1)^i / (i!(m−2i)!) · ζ^{m−2i} / 2^i, exact
        // integers, checked in i128.
        for m in 1..=12usize {
            let basis = HermiteBasis::new(m).unwrap();
            let mut want = vec![0i128; m + 1];
            let fact = |n: usize| -> i128 { (1..=n as i128).product::<i128>().max(1) };
            for i in 0..=m / 2 {
                let num = fact(m);
                let den = fact(i) * fact(m - 2 * i) * (1i128 << i);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                want[m - 2 * i] = sign * num / den;
            }
            for (j, &w) in want.iter().enumerate() {
                assert_eq!(
                    basis.coefficients()[j],
                    w as f64,
                    "He_{m} coefficient of ζ^{j}"
                );
            }
        }
    }

    #[test]
    fn known_low_degrees() {
        // He_2 = ζ² − 1, He_3 = ζ³ − 3ζ, He_4 = ζ⁴ − 6ζ² + 3.
        let h2 = HermiteBasis::new(2).unwrap();
        assert_eq!(h2.coefficients(), &[-1.0, 0.0, 1.0]);
        let h3 = HermiteBasis::new(3).unwrap();
        assert_eq!(h3.coefficients(), &[0.0, -3.0, 0.0, 1.0]);
        let h4 = HermiteBasis::new(4).unwrap();
        assert_eq!(h4.coefficients(), &[3.0, 0.0, -6.0, 0.0, 1.0]);
        // Roots of He_2 are ±1; of He_3 are 0, ±√3.
        assert!((h2.roots()[1] - 1.0).abs() < 1e-13);
        assert!((h3.roots()[2] - 3.0f64.sqrt()).abs() < 1e-13);
        assert_eq!(h3.roots()[1], 0.0);
    }

    #[test]
    fn roots_are_symmetric_and_accurate() {
        for m in 1..=14usize {
            let basis = HermiteBasis::new(m).unwrap();
            let roots = basis.roots();
            assert_eq!(roots.len(), m);
            for i in 0..m {
                // Symmetry is enforced exactly.
                assert_eq!(roots[i], -roots[m - 1 - i]);
                // Residual |He_m(λ)| should be at machine scale relative to
                // the derivative (distance-to-root measure).
                let resid = basis.eval(roots[i]).abs();
                let scale = basis.eval_derivative(roots[i]).abs();
                assert!(
                    resid <= 1e-12 * scale.max(1.0),
                    "He_{m} root {} residual {resid:e}",
                    roots[i]
                );
            }
            for w in roots.windows(2) {
                assert!(w[0] < w[1], "roots of He_{m} not strictly increasing");
            }
        }
    }

    #[test]
    fn derivative_interlaces() {
        // Between consecutive roots of He_m lies exactly one root of He_m',
        // so the derivative alternates in sign across the root list.
        let basis = HermiteBasis::new(7).unwrap();
        let signs: Vec<f64> = basis
            .derivative_at_roots()
            .iter()
            .map(|d| d.signum())
            .collect();
        for w in signs.windows(2) {
            assert_eq!(w[0], -w[1]);
        }
    }

    #[test]
    fn rejects_out_of_range_degree() {
        assert!(HermiteBasis::new(0).is_err());
        assert!(HermiteBasis::new(41).is_err());
    }
}
