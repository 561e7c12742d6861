//! Solver library for fragmentation equations with power-law coefficients
//! coupled to exponential growth or decay transport.
//!
//! The model is the population balance equation
//!
//! ```text
//! ∂_t u ± ∂_x( k x^γ u ) = −a x^α u + ∫_x^∞ a y^α b(x,y) u(y,t) dy,
//! b(x,y) = (ν+2)/y · (x/y)^ν,        −2 < ν ≤ 0,
//! ```
//!
//! for a mass density `u(x,t)` of particles of size `x > 0` that fragment at
//! rate `a x^α` while each particle grows (`+`) or decays (`−`) with speed
//! `k x^γ`. Two parameter families admit explicit solutions after a change of
//! variables, and this crate implements both end to end:
//!
//! * the **linear** family (`γ = 1`), solved globally by confluent
//!   hypergeometric kernels ([`linear`]),
//! * the **constant** family (`α = 1 − γ`, `γ = −ν`), solved by finite
//!   binomial operator expansions, with a Hermite-function boundary
//!   construction for the growth direction ([`constant`]).
//!
//! Everything runs through a shared operator calculus ([`operators`]) built on
//! the integration operators `J⁺[u](x) = ∫_x^∞ u` and `J⁻[u](x) = ∫_0^x u`,
//! plus the special functions they need ([`specfun`]). An independent
//! finite-difference/semi-Lagrangian integrator and quadrature moments
//! ([`oracle`]) cross-validate the closed forms without sharing any of their
//! code.
//!
//! Sizes, densities and moments are plain `f64`; Dirac components of
//! solutions are kept symbolic (location and weight) rather than smeared onto
//! grids, so conservation checks hold to quadrature accuracy.

pub mod constant;
pub mod grid;
pub mod linear;
pub mod model;
pub mod operators;
pub mod oracle;
pub mod specfun;

pub use grid::GridFunction;
pub use model::{DensitySnapshot, DerivedParams, InitialCondition, PhysicalParams};
