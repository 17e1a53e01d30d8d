//! Monte Carlo check of the dimension-reduction expansion
//! `q_k(r(xi_1) r(xi_2) x + xi_1 xi_2 / sqrt(d))
//!    = sum_t qt_{k-t}(x) r^{k-t}(xi_1) r^{k-t}(xi_2)
//!      sqrt((k)_t) q_t(xi_1) q_t(xi_2) / d^{t/2} + remainder`,
//! where `qt` is the basis one dimension down and
//! `r(xi) = (1 - 1/d)^{-1/4} (1 - xi^2/d)^{1/2}`. The remainder is `O(1/d)`;
//! this measures it empirically.

use super::GegenbauerBasis;
use crate::randgen::{sample_sdist, SeedSpec};
use rayon::prelude::*;

/// Aggregate absolute residuals over the sampled points.
#[derive(Debug, Clone, Copy)]
pub struct ResidualStats {
    pub max_abs: f64,
    pub mean_abs: f64,
    pub n_samples: usize,
}

/// Draws `(xi_1, xi_2)` from the dimension-`d` marginal and `x` from the
/// dimension-`d-1` marginal, and returns statistics of
/// `|LHS - leading sum|` for degree `k <= 3`.
pub fn validate_expansion(
    k: usize,
    d: usize,
    n_samples: usize,
    stream: &SeedSpec,
) -> ResidualStats {
    assert!(k <= 3, "small-degree check only (k <= 3)");
    assert!(d >= 10, "need d >= 10");
    assert!(n_samples >= 1);

    let basis = GegenbauerBasis::new(d, k);
    let basis_down = GegenbauerBasis::new(d - 1, k);
    let df = d as f64;
    let r_norm = (1.0 - 1.0 / df).powf(-0.25);
    // sqrt of falling factorials (k)_t for t = 0..=k
    let falling_sqrt: Vec<f64> = (0..=k)
        .map(|t| ((k - t + 1..=k).map(|v| v as f64).product::<f64>()).sqrt())
        .collect();

    const CHUNK: usize = 4096;
    let n_chunks = n_samples.div_ceil(CHUNK);
    let stats: Vec<(f64, f64)> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n_samples);
            let chunk_stream = stream.child("chunk", c as u64);
            let mut max_abs = 0.0f64;
            let mut sum_abs = 0.0f64;
            let mut q1 = vec![0.0; k + 1];
            let mut q2 = vec![0.0; k + 1];
            for i in lo..hi {
                let idx = i as u64;
                let xi1 = sample_sdist(d, &chunk_stream.child("xi1", idx));
                let xi2 = sample_sdist(d, &chunk_stream.child("xi2", idx));
                let x = sample_sdist(d - 1, &chunk_stream.child("x", idx));
                let r1 = r_norm * (1.0 - xi1 * xi1 / df).max(0.0).sqrt();
                let r2 = r_norm * (1.0 - xi2 * xi2 / df).max(0.0).sqrt();
                let lhs = basis.eval(k, r1 * r2 * x + xi1 * xi2 / df.sqrt());
                basis.eval_all(xi1, &mut q1);
                basis.eval_all(xi2, &mut q2);
                let mut rhs = 0.0;
                for t in 0..=k {
                    let r_pow = (r1 * r2).powi((k - t) as i32);
                    rhs += basis_down.eval(k - t, x)
                        * r_pow
                        * falling_sqrt[t]
                        * q1[t]
                        * q2[t]
                        / df.powf(t as f64 / 2.0);
                }
                let resid = (lhs - rhs).abs();
                max_abs = max_abs.max(resid);
                sum_abs += resid;
            }
            (max_abs, sum_abs)
        })
        .collect();

    let max_abs = stats.iter().fold(0.0f64, |acc, s| acc.max(s.0));
    let mean_abs = stats.iter().map(|s| s.1).sum::<f64>() / n_samples as f64;
    ResidualStats { max_abs, mean_abs, n_samples }
}
