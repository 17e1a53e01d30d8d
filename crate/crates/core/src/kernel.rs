//! Named kernel functions selectable from configuration, plus a compiled
//! per-dimension evaluator used during matrix assembly.

use crate::orthopoly::{
    hermite_eval, kernel_coeffs_gegenbauer, kernel_coeffs_hermite, BasisKind, GegenbauerBasis,
    KernelCoefficients,
};

/// A kernel `f` applied entrywise to scaled inner products. `Polynomial`
/// holds coefficients in the dimension-adapted orthonormal basis (the same
/// convention the expansion uses), so `Gegenbauer(k)` is `Polynomial` with a
/// single unit coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelFn {
    Constant(f64),
    Identity,
    Gegenbauer(usize),
    Hermite(usize),
    SoftThreshold(f64),
    Polynomial(Vec<f64>),
}

impl KernelFn {
    /// Degree for polynomial kinds; `None` for kernels that are not a finite
    /// combination of basis polynomials.
    pub fn polynomial_degree(&self) -> Option<usize> {
        match self {
            KernelFn::Constant(_) => Some(0),
            KernelFn::Identity => Some(1),
            KernelFn::Gegenbauer(k) | KernelFn::Hermite(k) => Some(*k),
            KernelFn::Polynomial(mu) => Some(mu.len().saturating_sub(1)),
            KernelFn::SoftThreshold(_) => None,
        }
    }

    /// Whether the kernel is a finite combination of basis polynomials (its
    /// finite-dimensional expansion terminates).
    pub fn is_polynomial(&self) -> bool {
        !matches!(self, KernelFn::SoftThreshold(_))
    }

    /// Prepares a fast evaluator for dimension `d`.
    pub fn compile(&self, d: usize) -> CompiledKernel {
        match self {
            KernelFn::Constant(c) => CompiledKernel::Constant(*c),
            KernelFn::Identity => CompiledKernel::Identity,
            KernelFn::Gegenbauer(k) => {
                let mut mu = vec![0.0; k + 1];
                mu[*k] = 1.0;
                CompiledKernel::BasisSum { basis: GegenbauerBasis::new(d, *k), mu }
            }
            KernelFn::Polynomial(mu) => {
                let deg = mu.len().saturating_sub(1);
                CompiledKernel::BasisSum { basis: GegenbauerBasis::new(d, deg), mu: mu.clone() }
            }
            KernelFn::Hermite(k) => CompiledKernel::Hermite(*k),
            KernelFn::SoftThreshold(tau) => CompiledKernel::SoftThreshold(*tau),
        }
    }

    /// Expansion coefficients at finite dimension `d`, exact where possible.
    pub fn coefficients_finite_d(&self, d: usize, max_degree: usize) -> KernelCoefficients {
        match self {
            KernelFn::Constant(c) => {
                let mut mu = vec![0.0; max_degree + 1];
                mu[0] = *c;
                KernelCoefficients::from_basis_coefficients(mu, BasisKind::FiniteD(d))
            }
            KernelFn::Identity => {
                let mut mu = vec![0.0; max_degree + 1];
                if max_degree >= 1 {
                    mu[1] = 1.0;
                }
                KernelCoefficients::from_basis_coefficients(mu, BasisKind::FiniteD(d))
            }
            KernelFn::Gegenbauer(k) => {
                let mut mu = vec![0.0; max_degree.max(*k) + 1];
                mu[*k] = 1.0;
                KernelCoefficients::from_basis_coefficients(mu, BasisKind::FiniteD(d))
            }
            KernelFn::Polynomial(coeffs) => {
                let mut mu = coeffs.clone();
                if mu.len() < max_degree + 1 {
                    mu.resize(max_degree + 1, 0.0);
                }
                KernelCoefficients::from_basis_coefficients(mu, BasisKind::FiniteD(d))
            }
            _ => {
                let compiled = self.compile(d);
                kernel_coeffs_gegenbauer(move |x| compiled.eval(x), d, max_degree)
            }
        }
    }

    /// Expansion coefficients in the Gaussian limit. For dimension-dependent
    /// kernels the evaluator at dimension `d` is projected on the Hermite
    /// basis.
    pub fn coefficients_hermite(&self, d: usize, max_degree: usize) -> KernelCoefficients {
        match self {
            KernelFn::Hermite(k) => {
                let mut mu = vec![0.0; max_degree.max(*k) + 1];
                mu[*k] = 1.0;
                KernelCoefficients::from_basis_coefficients(mu, BasisKind::HermiteLimit)
            }
            KernelFn::Constant(c) => {
                let mut mu = vec![0.0; max_degree + 1];
                mu[0] = *c;
                KernelCoefficients::from_basis_coefficients(mu, BasisKind::HermiteLimit)
            }
            KernelFn::Identity => {
                let mut mu = vec![0.0; max_degree + 1];
                if max_degree >= 1 {
                    mu[1] = 1.0;
                }
                KernelCoefficients::from_basis_coefficients(mu, BasisKind::HermiteLimit)
            }
            _ => {
                let compiled = self.compile(d);
                kernel_coeffs_hermite(move |x| compiled.eval(x), max_degree)
            }
        }
    }
}

/// Dimension-bound evaluator; basis sums run the shared recurrence once per
/// argument.
#[derive(Debug, Clone)]
pub enum CompiledKernel {
    Constant(f64),
    Identity,
    BasisSum { basis: GegenbauerBasis, mu: Vec<f64> },
    Hermite(usize),
    SoftThreshold(f64),
}

impl CompiledKernel {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CompiledKernel::Constant(c) => *c,
            CompiledKernel::Identity => x,
            CompiledKernel::BasisSum { basis, mu } => {
                let mut prev = 1.0;
                let mut acc = mu[0];
                if mu.len() == 1 {
                    return acc;
                }
                let mut cur = x;
                acc += mu[1] * cur;
                for j in 1..mu.len() - 1 {
                    let next = (x * cur - basis.recurrence_coefficient(j - 1) * prev)
                        / basis.recurrence_coefficient(j);
                    prev = cur;
                    cur = next;
                    acc += mu[j + 1] * cur;
                }
                acc
            }
            CompiledKernel::Hermite(k) => hermite_eval(*k, x),
            CompiledKernel::SoftThreshold(tau) => x.signum() * (x.abs() - tau).max(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compiled_matches_direct_basis_evaluation() {
        let d = 23;
        let basis = GegenbauerBasis::new(d, 5);
        let mu = vec![0.2, -1.0, 0.0, 0.5, 0.0, 2.0];
        let compiled = KernelFn::Polynomial(mu.clone()).compile(d);
        for x in [-3.0, -0.7, 0.0, 1.3, 4.9] {
            let direct: f64 = mu.iter().enumerate().map(|(k, m)| m * basis.eval(k, x)).sum();
            assert!((compiled.eval(x) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn soft_threshold_shape() {
        let f = KernelFn::SoftThreshold(1.0).compile(10);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(-0.5), 0.0);
        assert!((f.eval(1.5) - 0.5).abs() < 1e-15);
        assert!((f.eval(-2.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn gegenbauer_kernel_has_exact_unit_coefficient() {
        let coeffs = KernelFn::Gegenbauer(2).coefficients_finite_d(50, 5);
        assert_eq!(coeffs.mu, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(coeffs.sigma_sq, 1.0);
    }
}
