//! Numerical laboratory for higher-order spectral shift functions of Hermitian
//! matrix pairs `(H0, V)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`funcspace`] - scalar test functions with exact derivatives of every order.
//! * [`divdiff`] - confluent divided differences and their identities.
//! * [`piecewise`] - exact piecewise-polynomial calculus.
//! * [`splines`] - truncated powers, basic splines and their antiderivatives.
//! * [`spectral`] - Hermitian operators, clustered eigendecompositions, matrix functions.
//! * [`multimeasure`] - discrete multiple spectral measures on eigenvalue tuples.
//! * [`moi`] - multiple operator integrals: operator derivatives and their traces.
//! * [`ssf`] - Taylor remainders, Krein's function and the densities `eta_p`.

pub mod divdiff;
pub mod error;
pub mod funcspace;
pub mod moi;
pub mod multimeasure;
pub mod piecewise;
pub mod quadrature;
pub mod sample;
pub mod spectral;
pub mod splines;
pub mod ssf;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Dense complex matrix used for operators, projections and products.
pub type CMatrix = nalgebra::DMatrix<Complex64>;

/// Error relative to a reference value, normalised by `1 + |reference|`.
///
/// Used uniformly wherever a tolerance is described as relative, so values that
/// vanish (linear `f` at order two, zero perturbations) stay well defined.
pub fn rel_err(value: Complex64, reference: Complex64) -> f64 {
    (value - reference).norm() / (1.0 + reference.norm())
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * j as f64)
}
