//! A numerical laboratory for Fourier multiplier operators on discretized `ℝⁿ`.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`]: periodic boxes, centred discrete Fourier transforms, Lebesgue and
//!   mixed-norm quadrature, and the sampled-multiplier text format.
//! * [`bumps`]: the dyadic Littlewood–Paley bumps `ψ̂`, `θ̂` and the radial `Φ̂`.
//! * [`symbol`]: closed-form and sampled multiplier symbols.
//! * [`operators`]: `T_σ`, `Δ_j`, fractional Bessel/Laplacian powers, the
//!   directional maximal operator and the dyadic square function.
//! * [`conditions`]: the smoothness functionals (product Sobolev, Hörmander,
//!   classical Marcinkiewicz, mixed smoothness) and the admissibility test.
//! * [`experiments`]: runnable checks of the pointwise domination estimate, the
//!   one-dimensional dilation lemmas, the product/isotropic comparison and the
//!   sharpness example.
//! * [`cli`]: argument parsing and dispatch for the `mlab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bumps;
pub mod cli;
pub mod conditions;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod operators;
pub mod quad;
pub mod symbol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
