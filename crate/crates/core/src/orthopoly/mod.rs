//! Orthogonal polynomials adapted to the sphere marginal, their Hermite
//! limit, spherical-harmonic dimension counts, and kernel expansion
//! coefficients.
//!
//! The degree-`k` basis polynomial `q_k` is orthonormal with respect to the
//! law of `sqrt(d) * <x, y>` for independent uniform sphere points, and
//! satisfies the three-term recurrence
//! `x q_k = a_k q_{k+1} + a_{k-1} q_{k-1}` with `a_k -> sqrt(k+1)` as the
//! dimension grows, which is how every evaluation here proceeds.

mod coeffs;
mod expansion;
mod quadrature;

pub use coeffs::{
    kernel_coeffs_gegenbauer, kernel_coeffs_hermite, soft_threshold, BasisKind, KernelCoefficients,
};
pub use expansion::{validate_expansion, ResidualStats};
pub use quadrature::{gauss_hermite, gauss_sphere_marginal, QuadratureRule};

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use statrs::function::gamma::ln_gamma;

/// Orthonormal polynomial family for a fixed dimension, with the recurrence
/// coefficients `a_0..a_K` precomputed.
#[derive(Debug, Clone)]
pub struct GegenbauerBasis {
    d: usize,
    max_degree: usize,
    a: Vec<f64>,
}

impl GegenbauerBasis {
    /// `d >= 3`; degrees `0..=max_degree` become evaluable.
    pub fn new(d: usize, max_degree: usize) -> Self {
        assert!(d >= 3, "need dimension d >= 3");
        let df = d as f64;
        let a = (0..=max_degree)
            .map(|k| {
                let kf = k as f64;
                ((kf + 1.0) * (df + kf - 2.0) * df / ((df + 2.0 * kf) * (df + 2.0 * kf - 2.0)))
                    .sqrt()
            })
            .collect();
        Self { d, max_degree, a }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Recurrence coefficient `a_k`.
    pub fn recurrence_coefficient(&self, k: usize) -> f64 {
        self.a[k]
    }

    /// `q_k(x)` by upward recurrence from `q_0 = 1`, `q_1 = x`.
    pub fn eval(&self, k: usize, x: f64) -> f64 {
        assert!(k <= self.max_degree, "degree {k} out of range (max {})", self.max_degree);
        let mut prev = 1.0;
        if k == 0 {
            return prev;
        }
        let mut cur = x;
        for j in 1..k {
            let next = (x * cur - self.a[j - 1] * prev) / self.a[j];
            prev = cur;
            cur = next;
        }
        cur
    }

    /// All values `q_0(x)..q_K(x)` into `out` (length `max_degree + 1`) in a
    /// single pass of the recurrence.
    pub fn eval_all(&self, x: f64, out: &mut [f64]) {
        assert_eq!(out.len(), self.max_degree + 1);
        out[0] = 1.0;
        if self.max_degree == 0 {
            return;
        }
        out[1] = x;
        for j in 1..self.max_degree {
            out[j + 1] = (x * out[j] - self.a[j - 1] * out[j - 1]) / self.a[j];
        }
    }
}

/// Normalized probabilists' Hermite polynomial `h_k(x)`, the large-dimension
/// limit of `q_k`; recurrence `x h_k = sqrt(k+1) h_{k+1} + sqrt(k) h_{k-1}`.
pub fn hermite_eval(k: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = x;
    for j in 1..k {
        let jf = j as f64;
        let next = (x * cur - jf.sqrt() * prev) / (jf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    cur
}

/// Dimension `N_k` of the space of degree-`k` spherical harmonics on
/// `S^{d-1}`: `N_k = (2k+d-2)/k * C(k+d-3, k-1)`, computed exactly.
pub fn harmonic_dim(k: usize, d: usize) -> Result<u64> {
    assert!(d >= 3, "need dimension d >= 3");
    if k == 0 {
        return Ok(1);
    }
    let numer = binomial(k + d - 3, k - 1) * BigUint::from(2 * k + d - 2);
    let k_big = BigUint::from(k);
    debug_assert!((&numer % &k_big) == BigUint::from(0u32));
    (numer / k_big)
        .to_u64()
        .ok_or(Error::HarmonicDimOverflow { k, d })
}

fn binomial(n: usize, r: usize) -> BigUint {
    let r = r.min(n - r);
    let mut acc = BigUint::from(1u32);
    for i in 0..r {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// The scalar marginal of the sphere: law of `sqrt(d) * <x, e_1>` for `x`
/// uniform on `S^{d-1}`, with density proportional to `(1 - xi^2/d)^{(d-3)/2}`
/// on `[-sqrt(d), sqrt(d)]`.
#[derive(Debug, Clone, Copy)]
pub struct SphereMarginal {
    d: usize,
}

impl SphereMarginal {
    pub fn new(d: usize) -> Self {
        assert!(d >= 3, "need dimension d >= 3");
        Self { d }
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    /// Density at `xi`.
    pub fn pdf(&self, xi: f64) -> f64 {
        let d = self.d as f64;
        if xi * xi >= d {
            return 0.0;
        }
        let ln_norm = ln_gamma(d / 2.0) - ln_gamma((d - 1.0) / 2.0) - 0.5 * (d * std::f64::consts::PI).ln();
        (ln_norm + 0.5 * (d - 3.0) * (1.0 - xi * xi / d).ln()).exp()
    }

    /// Quadrature rule for this measure with `n_nodes` points.
    pub fn quadrature(&self, n_nodes: usize) -> QuadratureRule {
        gauss_sphere_marginal(self.d, n_nodes)
    }

    /// Absolute moment `E |xi|^p` in closed form via log-gamma.
    pub fn moment(&self, p: usize) -> f64 {
        sdist_moment(p, self.d)
    }
}

/// `E |xi|^p` for the sphere marginal:
/// `d^{p/2} Gamma(d/2) Gamma((p+1)/2) / (Gamma((d+p)/2) Gamma(1/2))`.
pub fn sdist_moment(p: usize, d: usize) -> f64 {
    assert!(d >= 3, "need dimension d >= 3");
    let (pf, df) = (p as f64, d as f64);
    let ln = 0.5 * pf * df.ln() + ln_gamma(df / 2.0) + ln_gamma((pf + 1.0) / 2.0)
        - ln_gamma((df + pf) / 2.0)
        - ln_gamma(0.5);
    ln.exp()
}
