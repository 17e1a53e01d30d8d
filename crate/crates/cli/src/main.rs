//! Command-line experiment runner for kernel random matrix spectra.

mod config;
mod error;
mod output;
mod presets;
mod runner;
mod svg;

use clap::{Parser, Subcommand};
use config::FileConfig;
use error::AppError;
use output::Metrics;
use presets::{Check, PanelKind};
use runner::{MatrixRecipe, RunSettings};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "kspec",
    about = "Kernel random matrix spectra: simulation, equivalent models, and limiting laws"
)]
struct Cli {
    /// Master seed (overrides the config file)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (overrides the config file)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for assembly and ensembles (0 = automatic)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Use the original experiment dimensions instead of desk-scaled ones
    #[arg(long, global = true)]
    paper_scale: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a kernel matrix, compare its spectrum with the limiting law
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Also draw the equivalent Wishart + GOE model
        #[arg(long)]
        equivalent: bool,
        /// Exit nonzero if quality thresholds fail
        #[arg(long)]
        check: bool,
    },
    /// Compare a polynomial kernel matrix with its equivalent model
    Equivalence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        check: bool,
    },
    /// Convergence-rate sweep over a list of dimensions
    Rate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        check: bool,
    },
    /// Run a named figure preset (figure1, figure2a, figure2b,
    /// figure3-linear, figure3-quadratic, figure3-cubic)
    Figure {
        preset: String,
        #[arg(long)]
        check: bool,
    },
    /// Write the theoretical limiting density only
    Density {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the kernel expansion coefficients
    Coeffs {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // ignore the error if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match &cli.command {
        Command::Simulate { config, equivalent, check } => {
            let cfg = FileConfig::load(config)?;
            let (recipe, regime, settings, out_dir) = resolve(&cfg, &cli)?;
            let metrics = runner::run_simulate(
                &recipe,
                &regime,
                &settings,
                &out_dir,
                *equivalent,
                "empirical spectrum vs limiting density",
            )?;
            print_metrics(&metrics);
            if *check {
                enforce(&[Check::KsBelow(0.05)], &metrics, regime.d)?;
            }
            Ok(())
        }
        Command::Equivalence { config, check } => {
            let cfg = FileConfig::load(config)?;
            let (recipe, regime, settings, out_dir) = resolve(&cfg, &cli)?;
            let metrics = runner::run_equivalence(
                &recipe,
                &regime,
                &settings,
                &out_dir,
                "kernel matrix vs equivalent model",
            )?;
            print_metrics(&metrics);
            if *check {
                enforce(&[Check::EquivalenceBelow(0.06)], &metrics, regime.d)?;
            }
            Ok(())
        }
        Command::Rate { config, check } => {
            let cfg = FileConfig::load(config)?;
            let rate = cfg
                .rate
                .clone()
                .ok_or_else(|| AppError::config("rate runs need a [rate] table with d_list"))?;
            let (recipe, regime, settings, out_dir) = resolve(&cfg, &cli)?;
            let seeds = settings.repeat.max(1);
            let report = runner::run_rate_check(
                &recipe,
                regime.ell,
                regime.kappa,
                &rate.d_list,
                seeds,
                settings.seed,
                &out_dir,
            )?;
            for ((d, n), err) in report
                .d_list
                .iter()
                .zip(&report.n_list)
                .zip(&report.mean_errors)
            {
                println!("d = {d:6}  n = {n:8}  mean sup error = {err:.6}");
            }
            println!("fitted log-log slope: {:.4}", report.slope);
            if *check {
                let mut failures = Vec::new();
                if report.slope > -0.3 {
                    failures.push(format!("slope {:.4} above -0.3", report.slope));
                }
                if !report.mean_errors.windows(2).all(|w| w[1] < w[0]) {
                    failures.push("mean errors are not strictly decreasing".into());
                }
                if !failures.is_empty() {
                    return Err(AppError::CheckFailed(failures));
                }
            }
            Ok(())
        }
        Command::Figure { preset, check } => {
            let plan = presets::preset(preset, cli.paper_scale)?;
            let seed = cli.seed.unwrap_or(0);
            let base_out = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(plan.name));
            let mut failures = Vec::new();
            for panel in &plan.panels {
                let settings = RunSettings { seed, eta: 1e-7, bins: None, grid: None, repeat: 1 };
                let out_dir = if plan.panels.len() > 1 {
                    base_out.join(panel.name)
                } else {
                    base_out.clone()
                };
                let title = format!("{} / {}", plan.name, panel.name);
                let metrics = match panel.kind {
                    PanelKind::Simulate => runner::run_simulate(
                        &panel.recipe,
                        &panel.regime,
                        &settings,
                        &out_dir,
                        false,
                        &title,
                    )?,
                    PanelKind::Equivalence => runner::run_equivalence(
                        &panel.recipe,
                        &panel.regime,
                        &settings,
                        &out_dir,
                        &title,
                    )?,
                    PanelKind::Figure3 => runner::run_figure3(
                        &panel.recipe,
                        &panel.regime,
                        &settings,
                        &out_dir,
                        &title,
                    )?,
                };
                println!("[{} / {}]", plan.name, panel.name);
                print_metrics(&metrics);
                if *check {
                    if let Err(AppError::CheckFailed(items)) =
                        enforce(&panel.checks, &metrics, panel.regime.d)
                    {
                        failures.extend(items.into_iter().map(|i| format!("{}: {i}", panel.name)));
                    }
                }
            }
            if !failures.is_empty() {
                return Err(AppError::CheckFailed(failures));
            }
            Ok(())
        }
        Command::Density { config } => {
            let cfg = FileConfig::load(config)?;
            let (recipe, regime, settings, out_dir) = resolve(&cfg, &cli)?;
            let curve = runner::run_density(&recipe, &regime, settings.grid, settings.eta, &out_dir)?;
            println!(
                "density curve: {} points, total mass {:.6}",
                curve.grid.len(),
                curve.total_mass()
            );
            Ok(())
        }
        Command::Coeffs { config } => {
            let cfg = FileConfig::load(config)?;
            let kernel = cfg.kernel.to_kernel()?;
            let regime = cfg.regime.to_regime()?;
            let max_degree = kernel.polynomial_degree().unwrap_or(0).max(regime.ell + 4);
            let finite = kernel.coefficients_finite_d(regime.d, max_degree);
            let hermite = kernel.coefficients_hermite(regime.d, max_degree);
            println!("k   mu_k (dimension {})   mu_k (gaussian limit)", regime.d);
            for k in 0..=max_degree {
                println!("{k:<3} {:>20.12} {:>22.12}", finite.mu[k], hermite.mu[k]);
            }
            println!("sigma^2: {:.12} (dimension {}), {:.12} (gaussian limit)", finite.sigma_sq, regime.d, hermite.sigma_sq);
            if finite.quadrature_warning || hermite.quadrature_warning {
                println!("note: quadrature self-check saw relative changes above 1e-8 (non-smooth kernel)");
            }
            Ok(())
        }
    }
}

fn resolve(
    cfg: &FileConfig,
    cli: &Cli,
) -> Result<(MatrixRecipe, kspec::kernelmat::RegimeSpec, RunSettings, PathBuf), AppError> {
    let kernel = cfg.kernel.to_kernel()?;
    let regime = cfg.regime.to_regime()?;
    let settings = RunSettings {
        seed: cli.seed.unwrap_or(cfg.seed),
        eta: cfg.eta,
        bins: cfg.bins,
        grid: cfg.grid,
        repeat: cfg.repeat,
    };
    let out_dir = cli.out.clone().unwrap_or_else(|| cfg.outputs.clone());
    Ok((MatrixRecipe::Kernel(kernel), regime, settings, out_dir))
}

fn print_metrics(metrics: &Metrics) {
    println!(
        "n = {}, d = {}, ell = {}, kappa = {}: ks = {:.4}, stieltjes sup error = {:.4} ({} ms)",
        metrics.n, metrics.d, metrics.ell, metrics.kappa, metrics.ks, metrics.stieltjes_sup_error, metrics.runtime_ms
    );
    if let Some(eq) = &metrics.equivalence {
        println!(
            "equivalence: ks(A, B) = {:.4}, ks(A, law) = {:.4}, ks(B, law) = {:.4}",
            eq.ks_ab, eq.ks_a_limit, eq.ks_b_limit
        );
    }
    if let Some(outl) = &metrics.outliers {
        println!(
            "outliers: {} above {:.4} (expected {}, bulk edge {:.4}, spike location {:.4})",
            outl.count, outl.threshold, outl.expected, outl.bulk_edge, outl.spike_location
        );
    }
}

fn enforce(checks: &[Check], metrics: &Metrics, d: usize) -> Result<(), AppError> {
    let mut failures = Vec::new();
    for check in checks {
        match *check {
            Check::KsBelow(bound) => {
                if !(metrics.ks < bound) {
                    failures.push(format!("ks {:.4} not below {bound}", metrics.ks));
                }
            }
            Check::EquivalenceBelow(bound) => match &metrics.equivalence {
                Some(eq) => {
                    if !(eq.ks_ab < bound) {
                        failures.push(format!("ks(A, B) {:.4} not below {bound}", eq.ks_ab));
                    }
                    if !(eq.ks_a_limit < bound) {
                        failures.push(format!("ks(A, law) {:.4} not below {bound}", eq.ks_a_limit));
                    }
                }
                None => failures.push("equivalence metrics missing".into()),
            },
            Check::OutlierCountWithin(frac) => match &metrics.outliers {
                Some(o) => {
                    let tol = (frac * d as f64).round() as usize;
                    if o.count.abs_diff(o.expected) > tol {
                        failures.push(format!(
                            "outlier count {} not within {tol} of {}",
                            o.count, o.expected
                        ));
                    }
                }
                None => failures.push("outlier metrics missing".into()),
            },
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(AppError::CheckFailed(failures))
    }
}
