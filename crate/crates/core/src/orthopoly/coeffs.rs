//! Expansion coefficients of a kernel function in the orthonormal polynomial
//! basis, either at finite dimension or in the Gaussian (Hermite) limit.

use super::quadrature::{gauss_hermite, gauss_sphere_marginal};
use super::{hermite_eval, GegenbauerBasis};

/// Which measure the coefficients refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Sphere marginal at dimension `d`.
    FiniteD(usize),
    /// Standard normal limit.
    HermiteLimit,
}

/// Coefficients `mu_0..mu_K` together with the total second moment
/// `sigma^2 = E f^2`; Bessel guarantees `sum mu_k^2 <= sigma^2`.
#[derive(Debug, Clone)]
pub struct KernelCoefficients {
    pub mu: Vec<f64>,
    pub sigma_sq: f64,
    pub basis_kind: BasisKind,
    /// Set when a doubled-node quadrature disagreed by more than `1e-8`
    /// in relative terms (non-smooth integrand; values still returned).
    pub quadrature_warning: bool,
}

impl KernelCoefficients {
    pub fn max_degree(&self) -> usize {
        self.mu.len() - 1
    }

    /// Builds exact coefficients (no quadrature) for a kernel already given
    /// in the orthonormal basis.
    pub fn from_basis_coefficients(mu: Vec<f64>, basis_kind: BasisKind) -> Self {
        let sigma_sq = mu.iter().map(|m| m * m).sum();
        Self { mu, sigma_sq, basis_kind, quadrature_warning: false }
    }

    /// `sum_{k <= K} mu_k^2`, the explained part of the variance.
    pub fn explained_variance(&self) -> f64 {
        self.mu.iter().map(|m| m * m).sum()
    }
}

fn project(
    f: &dyn Fn(f64) -> f64,
    eval_basis: &dyn Fn(usize, f64) -> f64,
    nodes: &[f64],
    weights: &[f64],
    max_degree: usize,
) -> (Vec<f64>, f64) {
    let mut mu = vec![0.0; max_degree + 1];
    let mut sigma_sq = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        let fx = f(x);
        sigma_sq += w * fx * fx;
        for (k, m) in mu.iter_mut().enumerate() {
            *m += w * fx * eval_basis(k, x);
        }
    }
    (mu, sigma_sq)
}

fn relative_gap(coarse: &(Vec<f64>, f64), fine: &(Vec<f64>, f64)) -> f64 {
    let mut gap: f64 = (coarse.1 - fine.1).abs() / (1.0 + fine.1.abs());
    for (a, b) in coarse.0.iter().zip(&fine.0) {
        gap = gap.max((a - b).abs() / (1.0 + b.abs()));
    }
    gap
}

/// Projects `f` on the dimension-`d` basis up to degree `max_degree` by
/// Gaussian quadrature for the sphere marginal. Runs the rule at `n` and `2n`
/// nodes (`n >= 2*max_degree + 64`) and flags disagreement.
pub fn kernel_coeffs_gegenbauer(
    f: impl Fn(f64) -> f64,
    d: usize,
    max_degree: usize,
) -> KernelCoefficients {
    let basis = GegenbauerBasis::new(d, max_degree);
    let n_nodes = 2 * max_degree + 64;
    let run = |n: usize| {
        let rule = gauss_sphere_marginal(d, n);
        project(&f, &|k, x| basis.eval(k, x), &rule.nodes, &rule.weights, max_degree)
    };
    let coarse = run(n_nodes);
    let fine = run(2 * n_nodes);
    let warning = relative_gap(&coarse, &fine) > 1e-8;
    KernelCoefficients {
        mu: fine.0,
        sigma_sq: fine.1,
        basis_kind: BasisKind::FiniteD(d),
        quadrature_warning: warning,
    }
}

/// Projects `f` on the Hermite basis (standard normal measure) up to degree
/// `max_degree`: 200-node Gauss-Hermite with a doubled-node self check.
pub fn kernel_coeffs_hermite(f: impl Fn(f64) -> f64, max_degree: usize) -> KernelCoefficients {
    let run = |n: usize| {
        let rule = gauss_hermite(n);
        project(&f, &|k, x| hermite_eval(k, x), &rule.nodes, &rule.weights, max_degree)
    };
    let coarse = run(200);
    let fine = run(400);
    let warning = relative_gap(&coarse, &fine) > 1e-8;
    KernelCoefficients {
        mu: fine.0,
        sigma_sq: fine.1,
        basis_kind: BasisKind::HermiteLimit,
        quadrature_warning: warning,
    }
}

/// `sign(x) * (|x| - tau)_+`, the soft-threshold kernel.
pub fn soft_threshold(tau: f64) -> impl Fn(f64) -> f64 {
    move |x: f64| x.signum() * (x.abs() - tau).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn projecting_a_basis_polynomial_recovers_a_unit_vector() {
        let d = 20;
        let basis = GegenbauerBasis::new(d, 5);
        let coeffs = kernel_coeffs_gegenbauer(|x| basis.eval(2, x), d, 5);
        for (k, &m) in coeffs.mu.iter().enumerate() {
            let expect = if k == 2 { 1.0 } else { 0.0 };
            assert!((m - expect).abs() < 1e-8, "k={k}: {m}");
        }
        assert!((coeffs.sigma_sq - 1.0).abs() < 1e-8);
        assert!(!coeffs.quadrature_warning);
    }

    #[test]
    fn constant_kernel() {
        let coeffs = kernel_coeffs_gegenbauer(|_| 1.0, 15, 4);
        assert_abs_diff_eq!(coeffs.mu[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(coeffs.sigma_sq, 1.0, epsilon = 1e-12);
        for &m in &coeffs.mu[1..] {
            assert!(m.abs() < 1e-10);
        }
    }

    #[test]
    fn parseval_for_polynomial_kernels() {
        // for a degree <= K polynomial, sum mu_k^2 = sigma^2
        let d = 30;
        let f = |x: f64| 0.3 - 1.1 * x + 0.25 * x.powi(3) + 0.05 * x.powi(4);
        let coeffs = kernel_coeffs_gegenbauer(f, d, 4);
        assert!((coeffs.explained_variance() - coeffs.sigma_sq).abs() < 1e-8);
        // Bessel with tolerance
        assert!(coeffs.explained_variance() <= coeffs.sigma_sq + 1e-8);
    }

    #[test]
    fn soft_threshold_hermite_coefficients_match_gaussian_integrals() {
        let coeffs = kernel_coeffs_hermite(soft_threshold(1.0), 6);
        // odd function: even-degree coefficients vanish
        assert!(coeffs.mu[0].abs() < 1e-10);
        assert!(coeffs.mu[2].abs() < 1e-10);
        // mu_1 = 2 (1 - Phi(1)), sigma^2 = 4 (1 - Phi(1)) - 2 phi(1)
        let q1 = 0.5 * statrs::function::erf::erfc(1.0 / 2f64.sqrt());
        let phi1 = (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((coeffs.mu[1] - 2.0 * q1).abs() < 1e-2);
        assert!((coeffs.sigma_sq - (4.0 * q1 - 2.0 * phi1)).abs() < 1e-2);
        // kinked integrand: the doubling check must notice
        assert!(coeffs.quadrature_warning);
    }

    #[test]
    fn soft_threshold_finite_d_approaches_hermite_value() {
        let coeffs = kernel_coeffs_gegenbauer(soft_threshold(1.0), 500, 6);
        assert!((coeffs.mu[1] - 0.3173).abs() < 1e-2, "mu_1 = {}", coeffs.mu[1]);
    }
}
