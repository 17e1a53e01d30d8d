//! Empirical spectra: eigenvalues of symmetric matrices, empirical Stieltjes
//! transforms, Kolmogorov-Smirnov distances, histograms, and outlier counts.

use crate::error::Result;
use crate::kernelmat::SymMatrix;
use crate::linalg;
use num_complex::Complex64;

/// Empirical spectral distribution: the sorted eigenvalue list.
#[derive(Debug, Clone)]
pub struct Esd {
    eigenvalues: Vec<f64>,
}

impl Esd {
    /// Wraps a raw list of eigenvalues (sorted internally).
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self { eigenvalues }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min(&self) -> f64 {
        *self.eigenvalues.first().expect("empty spectrum")
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    /// Empirical cumulative distribution (right-continuous).
    pub fn cdf(&self, x: f64) -> f64 {
        let idx = self.eigenvalues.partition_point(|&v| v <= x);
        idx as f64 / self.eigenvalues.len() as f64
    }
}

/// All eigenvalues of a dense symmetric matrix, ascending (values only).
pub fn eigenvalues_sym(a: &SymMatrix) -> Result<Esd> {
    let w = linalg::symmetric_eigenvalues(a.as_array().clone())?;
    Ok(Esd { eigenvalues: w })
}

/// Empirical Stieltjes transform `n^{-1} sum_i (lambda_i - z)^{-1}`; maps the
/// upper half-plane to itself.
pub fn empirical_stieltjes(esd: &Esd, z: Complex64) -> Complex64 {
    assert!(z.im > 0.0, "need Im z > 0");
    let n = esd.eigenvalues.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for &lambda in &esd.eigenvalues {
        acc += (Complex64::new(lambda, 0.0) - z).finv();
    }
    acc / n as f64
}

/// Exact Kolmogorov-Smirnov distance between the empirical distribution and a
/// reference CDF (possibly with jumps), evaluating both one-sided limits at
/// every sample point: the left limit of the empirical CDF is compared with
/// the reference just below the point, the right limit with its value at the
/// point.
pub fn ks_distance(esd: &Esd, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = esd.eigenvalues.len() as f64;
    let mut sup = 0.0f64;
    let mut i = 0;
    while i < esd.eigenvalues.len() {
        let x = esd.eigenvalues[i];
        // ties: the empirical CDF jumps from #{v < x}/n to #{v <= x}/n
        let mut j = i;
        while j < esd.eigenvalues.len() && esd.eigenvalues[j] == x {
            j += 1;
        }
        let below = i as f64 / n;
        let above = j as f64 / n;
        sup = sup
            .max((cdf(x.next_down()) - below).abs())
            .max((above - cdf(x)).abs());
        i = j;
    }
    sup
}

/// Number of eigenvalues strictly greater than `threshold`.
pub fn outlier_count(esd: &Esd, threshold: f64) -> usize {
    esd.eigenvalues.len() - esd.eigenvalues.partition_point(|&v| v <= threshold)
}

/// Density histogram normalized to total mass one.
#[derive(Debug, Clone)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub densities: Vec<f64>,
}

impl Histogram {
    /// Fixed number of equal-width bins over the sample range.
    pub fn with_bins(esd: &Esd, bins: usize) -> Self {
        assert!(bins >= 1);
        let (lo, hi) = (esd.min(), esd.max());
        let span = (hi - lo).max(1e-12);
        let width = span / bins as f64;
        let mut counts = vec![0usize; bins];
        for &v in &esd.eigenvalues {
            let idx = (((v - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let n = esd.eigenvalues.len() as f64;
        let densities = counts.iter().map(|&c| c as f64 / (n * width)).collect();
        let bin_edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
        Self { bin_edges, densities }
    }

    /// Freedman-Diaconis rule: bin width `2 IQR n^{-1/3}`.
    pub fn freedman_diaconis(esd: &Esd) -> Self {
        let n = esd.eigenvalues.len();
        let values = esd.eigenvalues();
        let q = |p: f64| -> f64 {
            let idx = (p * (n - 1) as f64).round() as usize;
            values[idx.min(n - 1)]
        };
        let iqr = q(0.75) - q(0.25);
        let span = esd.max() - esd.min();
        let width = 2.0 * iqr * (n as f64).powf(-1.0 / 3.0);
        let bins = if width > 0.0 && span > 0.0 {
            ((span / width).ceil() as usize).clamp(1, 2048)
        } else {
            1
        };
        Self::with_bins(esd, bins)
    }

    pub fn total_mass(&self) -> f64 {
        self.densities
            .iter()
            .enumerate()
            .map(|(i, &rho)| rho * (self.bin_edges[i + 1] - self.bin_edges[i]))
            .sum()
    }
}
