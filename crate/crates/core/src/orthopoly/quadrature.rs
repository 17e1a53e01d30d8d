//! Gaussian quadrature rules via Golub-Welsch: nodes are the eigenvalues of
//! the symmetric tridiagonal Jacobi matrix built from the three-term
//! recurrence coefficients, and the probability weights are the squared first
//! components of its eigenvectors.

use super::GegenbauerBasis;

/// Nodes and probability weights (`weights` sum to 1) for integrating against
/// a probability measure.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Rule for the sphere-marginal measure on `[-sqrt(d), sqrt(d)]`, i.e. the
/// Gauss-Jacobi rule with exponents `(d-3)/2` mapped through `u = xi/sqrt(d)`.
/// The Jacobi matrix in the `xi` variable has zero diagonal and off-diagonal
/// entries equal to the basis recurrence coefficients.
pub fn gauss_sphere_marginal(d: usize, n_nodes: usize) -> QuadratureRule {
    assert!(d >= 3, "need d >= 3");
    assert!(n_nodes >= 1);
    let basis = GegenbauerBasis::new(d, n_nodes);
    let diag = vec![0.0; n_nodes];
    let offdiag: Vec<f64> = (0..n_nodes.saturating_sub(1))
        .map(|k| basis.recurrence_coefficient(k))
        .collect();
    golub_welsch(diag, offdiag)
}

/// Gauss-Hermite rule for the standard normal measure (probabilists'
/// convention): off-diagonal entries `sqrt(k+1)`.
pub fn gauss_hermite(n_nodes: usize) -> QuadratureRule {
    assert!(n_nodes >= 1);
    let diag = vec![0.0; n_nodes];
    let offdiag: Vec<f64> = (1..n_nodes).map(|k| (k as f64).sqrt()).collect();
    golub_welsch(diag, offdiag)
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by the implicit QL
/// method, tracking only the first row of the eigenvector matrix. Returns
/// sorted nodes with weights `z_i^2` (which sum to 1 exactly in theory).
fn golub_welsch(mut diag: Vec<f64>, offdiag: Vec<f64>) -> QuadratureRule {
    let n = diag.len();
    assert_eq!(offdiag.len(), n.saturating_sub(1));
    let mut e = offdiag;
    e.push(0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }

    let max_iter = 50;
    for l in 0..n {
        let mut iter = 0;
        loop {
            // locate a negligible off-diagonal element
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= max_iter, "tridiagonal QL failed to converge");

            // Wilkinson shift
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e[l]);
            let r0 = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r0 } else { -r0 };
            g = diag[m] - diag[l] + e[l] / (g + sign_r);
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                let mut r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                // rotate the tracked eigenvector row
                f = z[i + 1];
                z[i + 1] = s * z[i] + c * f;
                z[i] = c * z[i] - s * f;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut pairs: Vec<(f64, f64)> = diag.into_iter().zip(z).map(|(x, zi)| (x, zi * zi)).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let nodes = pairs.iter().map(|p| p.0).collect();
    let weights = pairs.iter().map(|p| p.1).collect();
    QuadratureRule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_rule_reproduces_gaussian_moments() {
        let rule = gauss_hermite(40);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(rule.integrate(|x| x).abs() < 1e-12);
        assert!((rule.integrate(|x| x * x) - 1.0).abs() < 1e-12);
        assert!((rule.integrate(|x| x.powi(4)) - 3.0).abs() < 1e-11);
        assert!((rule.integrate(|x| x.powi(6)) - 15.0).abs() < 1e-10);
    }

    #[test]
    fn sphere_rule_mass_and_support() {
        for d in [3usize, 5, 50, 500] {
            let rule = gauss_sphere_marginal(d, 80);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "d = {d}, total = {total}");
            let bound = (d as f64).sqrt();
            for &x in &rule.nodes {
                assert!(x.abs() <= bound + 1e-9);
            }
            // second moment of the marginal is exactly 1
            assert!((rule.integrate(|x| x * x) - 1.0).abs() < 1e-10);
        }
    }
}
