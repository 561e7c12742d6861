//! Special functions underlying the closed-form solutions.
//!
//! Everything the explicit solution formulas and moment formulas need is
//! collected here:
//!
//! | function | role |
//! |----------|------|
//! | [`ln_gamma`], [`gamma`] | prefactors and Γ-ratios (always taken as log differences) |
//! | [`kummer_1f1`] | confluent hypergeometric ₁F₁(a;b;z), the density kernels |
//! | [`kummer_neg`], [`damped_kummer`] | overflow-safe ₁F₁ forms paired with their damping exponentials |
//! | [`upper_incomplete_gamma`] | Γ(s;x), mass-moment depletion factors |
//! | [`tricomi_psi`] | Tricomi Ψ(a;b;z), moments in the shattering regime |
//! | [`HermiteBasis`] | probabilists' Hermite polynomials, boundary construction |
//!
//! Accuracy contracts (enforced by the test suite): ₁F₁ to 1e-12 relative for
//! |z| ≤ 50, Γ(s;x) to 1e-10, Ψ to 1e-8, Hermite roots to 1e-12. The
//! algorithms follow the usual regime splits — Maclaurin series with argument
//! reduction for ₁F₁, series/continued-fraction crossover at `x = s + 1` for
//! Γ(s;x), an exponentially convergent integral representation for Ψ, and
//! Jacobi-matrix eigenvalues polished by one Newton step for Hermite roots.

mod gamma;
mod hermite;
mod incgamma;
mod kummer;
mod tricomi;

pub use gamma::{gamma, ln_gamma};
pub use hermite::HermiteBasis;
pub use incgamma::{regularized_upper_gamma, upper_incomplete_gamma};
pub use kummer::{damped_kummer, kummer_1f1, kummer_1f1_series, kummer_neg};
pub use tricomi::tricomi_psi;

/// Errors from special-function evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    /// A parameter lies outside the function's domain (e.g. ₁F₁ at a
    /// non-positive integer `b`, or Γ(s;x) with `s ≤ 0`).
    #[error("domain error in {func}: {reason}")]
    Domain {
        func: &'static str,
        reason: String,
    },
    /// A series or continued fraction failed to meet its stopping rule.
    #[error("{func} did not converge after {terms} terms")]
    Convergence { func: &'static str, terms: usize },
    /// The result (or a necessary intermediate) exceeds the f64 range.
    #[error("{func} overflowed the f64 range")]
    Overflow { func: &'static str },
}
