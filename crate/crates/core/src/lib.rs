//! Two-level Schwarz preconditioners for nonsymmetric linear systems from
//! interior-penalty discontinuous Galerkin discretizations of 1-D
//! convection-diffusion problems.
//!
//! The crate builds the full pipeline: dense linear-algebra kernels, the IPDG
//! discretization on `(0, 1)`, a nested two-level space decomposition with
//! exact local solvers, the additive/multiplicative/hybrid Schwarz operators,
//! GMRES and the stationary multiplicative iteration, and the spectral
//! diagnostics (A-norm condition numbers, spectra, Elman constants) used to
//! study them.
//!
//! All numerics are generic over the [`scalar::Real`] scalar; the aliases
//! below fix `f64`, which is the validated precision.

pub mod analysis;
pub mod decomposition;
pub mod dg;
pub mod error;
pub mod krylov;
pub mod linalg;
pub mod mesh;
pub mod operators;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};

/// Dense `f64` matrix.
pub type Matrix = linalg::DenseMatrix<f64>;
/// `f64` coefficient vector.
pub type Vector = Vec<f64>;
/// `f64` LU factorization.
pub type Factors = linalg::LuFactors<f64>;
/// `f64` eigenvalue set.
pub type SpectrumF64 = linalg::Spectrum<f64>;
