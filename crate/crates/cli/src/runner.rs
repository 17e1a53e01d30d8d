//! Experiment pipelines: sample data, assemble matrices, compute spectra and
//! limiting laws, evaluate metrics, and write the artifact bundle.

use crate::config::GridConfig;
use crate::error::AppError;
use crate::output::{
    write_density_csv, write_eigenvalues_csv, write_metrics_json, EnsembleOut, EquivalenceOut,
    Metrics, OutliersOut, ParamsOut,
};
use crate::svg::render_plot;
use kspec::kernel::KernelFn;
use kspec::kernelmat::{
    component_matrix, equivalent_model, kernel_matrix, truncate_matrix, RegimeSpec, SymMatrix,
};
use kspec::orthopoly::{gauss_sphere_marginal, BasisKind, GegenbauerBasis, KernelCoefficients};
use kspec::randgen::{DataMatrix, SeedSpec};
use kspec::spectra::{eigenvalues_sym, empirical_stieltjes, ks_distance, outlier_count, Esd, Histogram};
use kspec::theory::{params_from_kernel, solve_m, DensityCurve, EquivParams, LimitingLaw};
use num_complex::Complex64;
use rayon::prelude::*;
use std::path::Path;
use std::time::Instant;

/// What gets diagonal-assembled: either a plain kernel, or a basis
/// combination whose high degrees are entrywise-truncated after assembly.
#[derive(Debug, Clone)]
pub enum MatrixRecipe {
    Kernel(KernelFn),
    TruncatedCombo { mu: Vec<f64>, truncate_from: usize, threshold: f64 },
}

impl MatrixRecipe {
    pub fn assemble(&self, x: &DataMatrix) -> Result<SymMatrix, AppError> {
        match self {
            MatrixRecipe::Kernel(kernel) => Ok(kernel_matrix(kernel, x)?),
            MatrixRecipe::TruncatedCombo { mu, truncate_from, threshold } => {
                let head: Vec<f64> = mu.iter().copied().take(*truncate_from).collect();
                let mut a = kernel_matrix(&KernelFn::Polynomial(head), x)?;
                for (k, &weight) in mu.iter().enumerate().skip(*truncate_from) {
                    if weight == 0.0 {
                        continue;
                    }
                    let c = component_matrix(k, x)?;
                    let t = truncate_matrix(&c, *threshold);
                    a.add_scaled(&t, weight);
                }
                Ok(a)
            }
        }
    }

    /// Expansion coefficients determining the limiting law. Kernels with a
    /// terminating expansion use their exact basis weights (the
    /// dimension-independent limits); the soft-threshold kernel is projected
    /// on the Hermite basis. An entrywise-truncated combination is itself an
    /// inner-product kernel matrix for the truncated kernel function, so its
    /// law comes from projecting that exact function (a dense rule; the
    /// integrand has jumps).
    pub fn law_coefficients(&self, regime: &RegimeSpec) -> KernelCoefficients {
        let min_degree = regime.ell + 4;
        match self {
            MatrixRecipe::Kernel(kernel) => {
                if kernel.is_polynomial() {
                    kernel.coefficients_finite_d(regime.d, min_degree)
                } else {
                    kernel.coefficients_hermite(regime.d, min_degree)
                }
            }
            MatrixRecipe::TruncatedCombo { mu, truncate_from, threshold } => {
                let degree = (mu.len() - 1).max(min_degree);
                let basis = GegenbauerBasis::new(regime.d, degree);
                let rule = gauss_sphere_marginal(regime.d, 2000);
                let mut out = vec![0.0; degree + 1];
                let mut sigma_sq = 0.0;
                let mut vals = vec![0.0; degree + 1];
                for (&node, &w) in rule.nodes.iter().zip(&rule.weights) {
                    basis.eval_all(node, &mut vals);
                    let mut fv = 0.0;
                    for (k, &weight) in mu.iter().enumerate() {
                        if k < *truncate_from || vals[k].abs() <= *threshold {
                            fv += weight * vals[k];
                        }
                    }
                    sigma_sq += w * fv * fv;
                    for (k, m) in out.iter_mut().enumerate() {
                        *m += w * fv * vals[k];
                    }
                }
                KernelCoefficients {
                    mu: out,
                    sigma_sq,
                    basis_kind: BasisKind::FiniteD(regime.d),
                    quadrature_warning: false,
                }
            }
        }
    }
}

/// Fixed evaluation grid for the empirical-vs-limit transform comparison:
/// `E + i` for `E` in `[-3, 3]` with step `0.25`.
pub fn stieltjes_grid() -> Vec<Complex64> {
    (0..25).map(|i| Complex64::new(-3.0 + 0.25 * i as f64, 1.0)).collect()
}

pub fn stieltjes_sup_error(esd: &Esd, params: &EquivParams) -> Result<f64, AppError> {
    let mut sup = 0.0f64;
    for z in stieltjes_grid() {
        let m = solve_m(z, params)?;
        sup = sup.max((empirical_stieltjes(esd, z) - m).norm());
    }
    Ok(sup)
}

/// Everything the runners share per realisation.
pub struct Realization {
    pub esd: Esd,
    pub params: EquivParams,
    pub law: LimitingLaw,
    pub ks: f64,
    pub stieltjes_sup: f64,
}

pub struct RunSettings {
    pub seed: u64,
    pub eta: f64,
    pub bins: Option<usize>,
    pub grid: Option<GridConfig>,
    pub repeat: usize,
}

pub fn realize(
    recipe: &MatrixRecipe,
    regime: &RegimeSpec,
    seed: u64,
    rep: u64,
) -> Result<Realization, AppError> {
    let x = DataMatrix::sample(regime.d, regime.n, &SeedSpec::new(seed, "data", rep));
    let a = recipe.assemble(&x)?;
    let esd = eigenvalues_sym(&a)?;
    let coeffs = recipe.law_coefficients(regime);
    let params = params_from_kernel(&coeffs, regime)?;
    let law = LimitingLaw::new(params)?;
    let ks = ks_distance(&esd, |v| law.cdf(v));
    let stieltjes_sup = stieltjes_sup_error(&esd, &params)?;
    Ok(Realization { esd, params, law, ks, stieltjes_sup })
}

/// Density curve for plotting/CSV: the configured grid, or the default
/// spectrum-hugging window `[min - 0.5, max + 0.5]`.
pub fn plotting_curve(
    real: &Realization,
    grid: Option<GridConfig>,
    eta: f64,
) -> Result<DensityCurve, AppError> {
    let (lo, hi, points) = match grid {
        Some(g) => (g.min, g.max, g.points),
        None => (real.esd.min() - 0.5, real.esd.max() + 0.5, 801),
    };
    let step = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| lo + i as f64 * step).collect();
    Ok(kspec::theory::limiting_density(&xs, &real.params, eta)?)
}

pub fn write_bundle(
    dir: &Path,
    real: &Realization,
    curve: &DensityCurve,
    metrics: &Metrics,
    bins: Option<usize>,
    title: &str,
) -> Result<(), AppError> {
    std::fs::create_dir_all(dir)?;
    write_eigenvalues_csv(&dir.join("eigenvalues.csv"), &real.esd)?;
    write_density_csv(&dir.join("density.csv"), curve)?;
    write_metrics_json(&dir.join("metrics.json"), metrics)?;
    let hist = match bins {
        Some(b) => Histogram::with_bins(&real.esd, b),
        None => Histogram::freedman_diaconis(&real.esd),
    };
    std::fs::write(dir.join("plot.svg"), render_plot(&hist, curve, title))?;
    Ok(())
}

pub fn base_metrics(real: &Realization, regime: &RegimeSpec, seed: u64, start: Instant) -> Metrics {
    Metrics {
        ks: real.ks,
        stieltjes_sup_error: real.stieltjes_sup,
        n: regime.n,
        d: regime.d,
        ell: regime.ell,
        kappa: regime.kappa,
        seed,
        runtime_ms: start.elapsed().as_millis() as u64,
        params: ParamsOut { t1: real.params.t1, t2: real.params.t2, t3: real.params.t3 },
        equivalence: None,
        outliers: None,
        ensemble: None,
    }
}

/// Simulation run: sample, diagonalize, compare with the limiting law, write
/// the artifact bundle; optionally also draw the equivalent model.
pub fn run_simulate(
    recipe: &MatrixRecipe,
    regime: &RegimeSpec,
    settings: &RunSettings,
    out_dir: &Path,
    with_equivalent: bool,
    title: &str,
) -> Result<Metrics, AppError> {
    let start = Instant::now();
    let reps: Vec<Realization> = (0..settings.repeat as u64)
        .into_par_iter()
        .map(|rep| realize(recipe, regime, settings.seed, rep))
        .collect::<Result<_, _>>()?;
    let real = &reps[0];
    let mut metrics = base_metrics(real, regime, settings.seed, start);

    if with_equivalent {
        let coeffs = recipe.law_coefficients(regime);
        let b = equivalent_model(&coeffs, regime, &SeedSpec::new(settings.seed, "equivalent", 0))?;
        let esd_b = eigenvalues_sym(&b)?;
        std::fs::create_dir_all(out_dir)?;
        write_eigenvalues_csv(&out_dir.join("equivalent_eigenvalues.csv"), &esd_b)?;
        metrics.equivalence = Some(EquivalenceOut {
            ks_ab: ks_distance(&real.esd, |v| esd_b.cdf(v)),
            ks_a_limit: real.ks,
            ks_b_limit: ks_distance(&esd_b, |v| real.law.cdf(v)),
        });
    }
    if settings.repeat > 1 {
        let ks_all: Vec<f64> = reps.iter().map(|r| r.ks).collect();
        metrics.ensemble = Some(EnsembleOut {
            repeats: settings.repeat,
            ks_mean: ks_all.iter().sum::<f64>() / ks_all.len() as f64,
            ks_max: ks_all.iter().fold(0.0f64, |m, &v| m.max(v)),
        });
        for (i, rep_real) in reps.iter().enumerate().skip(1) {
            let sub = out_dir.join(format!("rep-{i:03}"));
            std::fs::create_dir_all(&sub)?;
            write_eigenvalues_csv(&sub.join("eigenvalues.csv"), &rep_real.esd)?;
        }
    }
    metrics.runtime_ms = start.elapsed().as_millis() as u64;
    let curve = plotting_curve(real, settings.grid, settings.eta)?;
    write_bundle(out_dir, real, &curve, &metrics, settings.bins, title)?;
    Ok(metrics)
}

/// Equivalence run for polynomial kernels: independent draws of the kernel
/// matrix and its equivalent model, with both compared to each other and to
/// the limiting law.
pub fn run_equivalence(
    recipe: &MatrixRecipe,
    regime: &RegimeSpec,
    settings: &RunSettings,
    out_dir: &Path,
    title: &str,
) -> Result<Metrics, AppError> {
    if let MatrixRecipe::Kernel(kernel) = recipe {
        if !kernel.is_polynomial() {
            return Err(AppError::config(
                "equivalence runs require a kernel with a terminating expansion",
            ));
        }
    }
    let start = Instant::now();
    let real = realize(recipe, regime, settings.seed, 0)?;
    let coeffs = recipe.law_coefficients(regime);
    let b = equivalent_model(&coeffs, regime, &SeedSpec::new(settings.seed, "equivalent", 0))?;
    let esd_b = eigenvalues_sym(&b)?;
    let mut metrics = base_metrics(&real, regime, settings.seed, start);
    metrics.equivalence = Some(EquivalenceOut {
        ks_ab: ks_distance(&real.esd, |v| esd_b.cdf(v)),
        ks_a_limit: real.ks,
        ks_b_limit: ks_distance(&esd_b, |v| real.law.cdf(v)),
    });
    metrics.runtime_ms = start.elapsed().as_millis() as u64;
    let curve = plotting_curve(&real, settings.grid, settings.eta)?;
    write_bundle(out_dir, &real, &curve, &metrics, settings.bins, title)?;
    write_eigenvalues_csv(&out_dir.join("equivalent_eigenvalues.csv"), &esd_b)?;
    Ok(metrics)
}

/// Report from a convergence-rate sweep over dimensions.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RateReport {
    pub d_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub seeds: usize,
    pub mean_errors: Vec<f64>,
    pub per_seed_errors: Vec<Vec<f64>>,
    pub slope: f64,
}

/// Average sup-distance between the empirical transform and the limit on the
/// fixed grid, per dimension, with a log-log slope fit.
pub fn run_rate_check(
    recipe: &MatrixRecipe,
    ell: usize,
    kappa: f64,
    d_list: &[usize],
    seeds: usize,
    base_seed: u64,
    out_dir: &Path,
) -> Result<RateReport, AppError> {
    if d_list.len() < 3 {
        return Err(AppError::config("rate checks need at least 3 dimensions"));
    }
    let mut per_seed_errors = Vec::with_capacity(d_list.len());
    let mut mean_errors = Vec::with_capacity(d_list.len());
    let mut n_list = Vec::with_capacity(d_list.len());
    for &d in d_list {
        let regime = RegimeSpec::new(ell, kappa, d);
        n_list.push(regime.n);
        let coeffs = recipe.law_coefficients(&regime);
        let params = params_from_kernel(&coeffs, &regime)?;
        let errors: Vec<f64> = (0..seeds as u64)
            .into_par_iter()
            .map(|s| -> Result<f64, AppError> {
                let x = DataMatrix::sample(regime.d, regime.n, &SeedSpec::new(base_seed + s, "data", 0));
                let a = recipe.assemble(&x)?;
                let esd = eigenvalues_sym(&a)?;
                stieltjes_sup_error(&esd, &params)
            })
            .collect::<Result<_, _>>()?;
        mean_errors.push(errors.iter().sum::<f64>() / errors.len() as f64);
        per_seed_errors.push(errors);
    }
    let xs: Vec<f64> = d_list.iter().map(|&d| (d as f64).ln()).collect();
    let ys: Vec<f64> = mean_errors.iter().map(|e| e.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xm) * (y - ym))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xm) * (x - xm)).sum::<f64>();
    let report = RateReport {
        d_list: d_list.to_vec(),
        n_list,
        seeds,
        mean_errors,
        per_seed_errors,
        slope,
    };
    std::fs::create_dir_all(out_dir)?;
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| AppError::runtime(format!("report serialization failed: {e}")))?;
    std::fs::write(out_dir.join("rate_report.json"), text + "\n")?;
    Ok(report)
}

/// Spike-counting run for the thresholded kernel in superlinear regimes: the
/// counting threshold is the midpoint of the theoretical bulk edge
/// `2 sqrt(t3)` and the predicted spike location `mu_1 sqrt(n/d)`.
pub fn run_figure3(
    recipe: &MatrixRecipe,
    regime: &RegimeSpec,
    settings: &RunSettings,
    out_dir: &Path,
    title: &str,
) -> Result<Metrics, AppError> {
    let start = Instant::now();
    let real = realize(recipe, regime, settings.seed, 0)?;
    let mut metrics = base_metrics(&real, regime, settings.seed, start);
    if regime.ell >= 2 {
        let coeffs = recipe.law_coefficients(regime);
        let mu1 = coeffs.mu.get(1).copied().unwrap_or(0.0);
        let spike = mu1 * (regime.n as f64 / regime.d as f64).sqrt();
        let bulk_edge = 2.0 * real.params.t3.sqrt();
        let threshold = 0.5 * (bulk_edge + spike);
        metrics.outliers = Some(OutliersOut {
            threshold,
            count: outlier_count(&real.esd, threshold),
            expected: regime.d,
            bulk_edge,
            spike_location: spike,
        });
    }
    metrics.runtime_ms = start.elapsed().as_millis() as u64;
    let curve = plotting_curve(&real, settings.grid, settings.eta)?;
    write_bundle(out_dir, &real, &curve, &metrics, settings.bins, title)?;
    Ok(metrics)
}

/// Theory-only density: no sampling, just the law on the requested grid.
pub fn run_density(
    recipe: &MatrixRecipe,
    regime: &RegimeSpec,
    grid: Option<GridConfig>,
    eta: f64,
    out_dir: &Path,
) -> Result<DensityCurve, AppError> {
    let coeffs = recipe.law_coefficients(regime);
    let params = params_from_kernel(&coeffs, regime)?;
    let (lo, hi, points) = match grid {
        Some(g) => (g.min, g.max, g.points),
        None => {
            let (lo, hi) = kspec::theory::support_bracket(&params);
            (lo, hi, 801)
        }
    };
    let step = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points).map(|i| lo + i as f64 * step).collect();
    let curve = kspec::theory::limiting_density(&xs, &params, eta)?;
    std::fs::create_dir_all(out_dir)?;
    write_density_csv(&out_dir.join("density.csv"), &curve)?;
    Ok(curve)
}
