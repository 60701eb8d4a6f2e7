//! Numerical spectral theory of rank-one perturbations.
//!
//! The crate covers self-adjoint rank-one families on the line
//! ([`aronszajn`]), Schur functions and their Clark measures on the circle
//! ([`clark`]), finite truncations of the model space of a contraction
//! ([`model`]), the adjoint Clark operator ([`clark_op`]) and small Anderson
//! models ([`anderson`]). The `spectra` binary drives all of them from JSON
//! configs.

// `!(x < y)` is used on purpose: it is true for NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anderson;
pub mod aronszajn;
pub mod clark;
pub mod clark_op;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod measure;
pub mod model;
pub mod poly;

pub use error::{Result, SpectraError};
