//! Assembly of the kernel random matrix, its polynomial component matrices,
//! entrywise truncation, and the equivalent Wishart + GOE model.

use crate::error::{Error, Result};
use crate::kernel::{CompiledKernel, KernelFn};
use crate::linalg;
use crate::orthopoly::{harmonic_dim, GegenbauerBasis, KernelCoefficients};
use crate::randgen::{gaussian_matrix, goe_matrix, sphere_sample, DataMatrix, SeedSpec};
use ndarray::Array2;
use rayon::prelude::*;

/// Dense symmetric matrix; only the upper triangle is ever assembled and it
/// is mirrored, so symmetry is exact by construction.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    data: Array2<f64>,
}

impl SymMatrix {
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    /// Wraps a matrix that is already exactly symmetric.
    pub(crate) fn from_symmetric_unchecked(data: Array2<f64>) -> Self {
        debug_assert_eq!(data.nrows(), data.ncols());
        Self { data }
    }

    /// Builds from an upper-triangle generator (`i <= j`), mirroring.
    pub fn from_fn_upper(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[(i, j)] = v;
                data[(j, i)] = v;
            }
        }
        Self { data }
    }

    /// `self + scale * other`, entrywise.
    pub fn add_scaled(&mut self, other: &SymMatrix, scale: f64) {
        assert_eq!(self.n(), other.n());
        self.data.zip_mut_with(&other.data, |a, &b| *a += scale * b);
    }

    pub fn scale(&mut self, scale: f64) {
        self.data.mapv_inplace(|v| v * scale);
    }
}

/// Sampling regime `n ~ kappa * d^ell`, with `n` defaulting to the rounded
/// value.
#[derive(Debug, Clone, Copy)]
pub struct RegimeSpec {
    pub ell: usize,
    pub kappa: f64,
    pub d: usize,
    pub n: usize,
}

impl RegimeSpec {
    pub fn new(ell: usize, kappa: f64, d: usize) -> Self {
        assert!(ell >= 1, "need ell >= 1");
        assert!(kappa > 0.0, "need kappa > 0");
        let n = (kappa * (d as f64).powi(ell as i32)).round() as usize;
        assert!(n >= 2, "regime gives n = {n} < 2");
        Self { ell, kappa, d, n }
    }

    pub fn with_n(ell: usize, kappa: f64, d: usize, n: usize) -> Self {
        assert!(ell >= 1 && n >= 2);
        Self { ell, kappa, d, n }
    }
}

/// Kernel matrix: `A_ij = f(sqrt(d) x_i . x_j) / sqrt(n)` off the diagonal,
/// zero on it. The Gram matrix is formed once and mapped entrywise.
pub fn kernel_matrix(kernel: &KernelFn, x: &DataMatrix) -> Result<SymMatrix> {
    let compiled = kernel.compile(x.d());
    kernel_matrix_compiled(&compiled, x)
}

pub(crate) fn kernel_matrix_compiled(compiled: &CompiledKernel, x: &DataMatrix) -> Result<SymMatrix> {
    let (d, n) = (x.d(), x.n());
    let mut gram = linalg::gram_tt(x.as_array());
    let sqrt_d = (d as f64).sqrt();
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();

    let bad = gram
        .as_slice_mut()
        .expect("standard layout")
        .par_chunks_mut(n)
        .enumerate()
        .map(|(i, row)| {
            for (j, cell) in row.iter_mut().enumerate() {
                if i == j {
                    *cell = 0.0;
                    continue;
                }
                let v = compiled.eval(sqrt_d * *cell) * inv_sqrt_n;
                if !v.is_finite() {
                    return Some((i, j, sqrt_d * *cell, v));
                }
                *cell = v;
            }
            None
        })
        .find_map_any(|bad| bad);
    if let Some((i, j, arg, value)) = bad {
        return Err(Error::NonFiniteEntry { i, j, arg, value });
    }

    // the Gram product is exactly symmetric entrywise only up to rounding;
    // mirror the upper triangle to make symmetry exact
    for i in 0..n {
        for j in (i + 1)..n {
            let v = gram[(i, j)];
            gram[(j, i)] = v;
        }
    }
    Ok(SymMatrix { data: gram })
}

/// Component matrix for a single basis degree: the kernel matrix of `q_k`.
pub fn component_matrix(k: usize, x: &DataMatrix) -> Result<SymMatrix> {
    kernel_matrix(&KernelFn::Gegenbauer(k), x)
}

/// Entrywise truncation: keeps `A_ij` iff `|A_ij| <= threshold / sqrt(n)`,
/// zeroing the rest; the diagonal is untouched.
pub fn truncate_matrix(a: &SymMatrix, threshold: f64) -> SymMatrix {
    assert!(threshold > 0.0, "need threshold > 0");
    let n = a.n();
    let cut = threshold / (n as f64).sqrt();
    let mut data = a.data.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j && data[(i, j)].abs() > cut {
                data[(i, j)] = 0.0;
            }
        }
    }
    SymMatrix { data }
}

/// Equivalent model `B = mu_ell * B_ell + gamma * H` with
/// `B_ell = WᵀW / sqrt(n N_ell) - sqrt(N_ell / n) I` for an i.i.d. Gaussian
/// `N_ell x n` matrix `W`, and `H` an independent GOE matrix.
///
/// `gamma^2` is the residual variance above degree `ell`: the tail sum of
/// squared coefficients for exact expansions, `sigma^2 - sum_{k <= ell}` for
/// quadrature ones. Sub-streams used: `("wishart", 0)` for `W` and
/// `("goe", 0)` for `H`.
pub fn equivalent_model(
    coeffs: &KernelCoefficients,
    regime: &RegimeSpec,
    stream: &SeedSpec,
) -> Result<SymMatrix> {
    let (ell, d, n) = (regime.ell, regime.d, regime.n);
    assert!(ell <= coeffs.max_degree(), "need coefficients up to degree ell");
    let mu_ell = coeffs.mu[ell];

    let head: f64 = coeffs.mu[..=ell].iter().map(|m| m * m).sum();
    let mut gamma_sq = coeffs.sigma_sq - head;
    if gamma_sq < 0.0 {
        if gamma_sq < -1e-8 {
            return Err(Error::NegativeVariance { value: gamma_sq });
        }
        gamma_sq = 0.0;
    }
    let gamma = gamma_sq.sqrt();

    let mut b = shifted_wishart(ell, d, n, &stream.child("wishart", 0))?;
    b.scale(mu_ell);
    if gamma > 0.0 {
        let h = goe_matrix(n, &stream.child("goe", 0))?;
        b.add_scaled(&h, gamma);
    }
    Ok(b)
}

/// The centered Wishart component `B_ell` alone.
pub fn shifted_wishart(ell: usize, d: usize, n: usize, stream: &SeedSpec) -> Result<SymMatrix> {
    let n_ell = harmonic_dim(ell, d)? as usize;
    let w = gaussian_matrix(n_ell, n, stream);
    let mut g = linalg::gram_tt(&w);
    let scale = 1.0 / ((n as f64) * (n_ell as f64)).sqrt();
    let shift = ((n_ell as f64) / (n as f64)).sqrt();
    g.mapv_inplace(|v| v * scale);
    for i in 0..n {
        g[(i, i)] -= shift;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = g[(i, j)];
            g[(j, i)] = v;
        }
    }
    Ok(SymMatrix { data: g })
}

/// Monte Carlo estimate and standard error.
#[derive(Debug, Clone, Copy)]
pub struct McResidual {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

/// Estimates `E_z[q_k(sqrt(d) x.z) q_k(sqrt(d) z.y)] - q_k(sqrt(d) x.y) / sqrt(N_k)`
/// over uniform `z`, for fixed random sphere points `x, y`; the identity makes
/// this zero in expectation.
pub fn addition_theorem_residual(
    k: usize,
    d: usize,
    n_samples: usize,
    stream: &SeedSpec,
) -> Result<McResidual> {
    assert!(k <= 6, "degree check only covers k <= 6");
    assert!(d >= 5, "need d >= 5");
    let basis = GegenbauerBasis::new(d, k);
    let x = sphere_sample(d, &stream.child("x", 0));
    let y = sphere_sample(d, &stream.child("y", 0));
    let sqrt_d = (d as f64).sqrt();
    let n_k = harmonic_dim(k, d)? as f64;
    let target = basis.eval(k, sqrt_d * x.dot(&y)) / n_k.sqrt();

    const CHUNK: usize = 8192;
    let n_chunks = n_samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n_samples);
            let chunk_stream = stream.child("z", c as u64);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for i in lo..hi {
                let z = sphere_sample(d, &chunk_stream.child("s", i as u64));
                let v = basis.eval(k, sqrt_d * x.dot(&z)) * basis.eval(k, sqrt_d * z.dot(&y));
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let total: f64 = sums.iter().map(|s| s.0).sum();
    let total_sq: f64 = sums.iter().map(|s| s.1).sum();
    let nf = n_samples as f64;
    let mean = total / nf;
    let var = (total_sq / nf - mean * mean).max(0.0);
    Ok(McResidual {
        estimate: mean - target,
        std_error: (var / nf).sqrt(),
        n_samples,
    })
}
