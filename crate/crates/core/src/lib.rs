//! Random inner-product kernel matrices and their limiting spectra.
//!
//! The library builds the `n x n` random matrix with entries
//! `f(sqrt(d) x_i . x_j) / sqrt(n)` (zero diagonal) for data uniform on the
//! sphere `S^{d-1}`, the matching equivalent model (a shifted Wishart matrix
//! plus an independent GOE matrix), and the limiting spectral density given
//! by the free additive convolution of a shifted Marchenko-Pastur law with a
//! semicircle law, in the regime `n ~ kappa d^ell`.
//!
//! Modules:
//! - [`orthopoly`]: the dimension-adapted orthonormal polynomials, their
//!   Hermite limit, quadrature, and kernel expansion coefficients;
//! - [`randgen`]: deterministic stream-keyed sampling of spheres, scalars,
//!   Gaussian and GOE matrices;
//! - [`kernel`]: named kernel functions;
//! - [`kernelmat`]: matrix assembly, truncation, and the equivalent model;
//! - [`spectra`]: eigenvalues, empirical transforms, histograms, distances;
//! - [`theory`]: the self-consistent equation, density and CDF inversion.

pub mod error;
pub mod kernel;
pub mod kernelmat;
mod linalg;
pub mod orthopoly;
pub mod randgen;
pub mod spectra;
pub mod theory;

pub use error::{Error, Result};
