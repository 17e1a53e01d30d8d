//! Error type shared across the library.

use num_complex::Complex64;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("harmonic dimension N_{k} at d = {d} exceeds u64 range")]
    HarmonicDimOverflow { k: usize, d: usize },

    #[error("kernel produced a non-finite value at entry ({i}, {j}): f({arg}) = {value}")]
    NonFiniteEntry { i: usize, j: usize, arg: f64, value: f64 },

    #[error("symmetric eigensolver did not converge (dsyevd info = {info})")]
    EigenSolver { info: i32 },

    #[error("no solution with positive imaginary part at z = {z} (need Im z > 0)")]
    NoUpperRoot { z: Complex64 },

    #[error("inconsistent expansion coefficients: residual variance {value} < 0")]
    NegativeVariance { value: f64 },

    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
