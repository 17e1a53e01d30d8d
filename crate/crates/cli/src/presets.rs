//! Named figure presets with desk-scaled default dimensions; the original
//! experiment dimensions are selected with `--paper-scale`.

use crate::error::AppError;
use crate::runner::MatrixRecipe;
use kspec::kernel::KernelFn;
use kspec::kernelmat::RegimeSpec;

/// How a preset panel is judged under `--check`.
#[derive(Debug, Clone, Copy)]
pub enum Check {
    /// `ks` (against the limiting law) below the bound.
    KsBelow(f64),
    /// Two-sample distance between the kernel matrix and its equivalent model
    /// below the bound, and `ks` below it as well.
    EquivalenceBelow(f64),
    /// Spike count within the fraction of the expected `d`.
    OutlierCountWithin(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PanelKind {
    Simulate,
    Equivalence,
    Figure3,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub name: &'static str,
    pub kind: PanelKind,
    pub recipe: MatrixRecipe,
    pub regime: RegimeSpec,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub panels: Vec<Panel>,
}

pub const PRESET_NAMES: &[&str] = &[
    "figure1",
    "figure2a",
    "figure2b",
    "figure3-linear",
    "figure3-quadratic",
    "figure3-cubic",
];

pub fn preset(name: &str, paper_scale: bool) -> Result<Preset, AppError> {
    let inv_sqrt20 = 1.0 / 20f64.sqrt();
    match name {
        // single polynomial components in the quadratic regime: the degree-2
        // matrix follows the shifted MP law, higher degrees the semicircle
        "figure1" => {
            let d = if paper_scale { 300 } else { 100 };
            let regime = RegimeSpec::new(2, 0.15, d);
            let panels = [2usize, 3, 4]
                .iter()
                .map(|&k| Panel {
                    name: match k {
                        2 => "q2",
                        3 => "q3",
                        _ => "q4",
                    },
                    kind: PanelKind::Simulate,
                    recipe: MatrixRecipe::Kernel(KernelFn::Gegenbauer(k)),
                    regime,
                    checks: vec![Check::KsBelow(0.05)],
                })
                .collect();
            Ok(Preset { name: "figure1", panels })
        }
        // a signed combination of degree-2..4 components against its
        // Wishart + GOE equivalent
        "figure2a" => {
            let (d, n) = if paper_scale { (100, 18_000) } else { (60, 6_480) };
            let regime = RegimeSpec::with_n(2, 1.8, d, n);
            Ok(Preset {
                name: "figure2a",
                panels: vec![Panel {
                    name: "combo",
                    kind: PanelKind::Equivalence,
                    recipe: MatrixRecipe::Kernel(KernelFn::Polynomial(vec![
                        0.0,
                        0.0,
                        -1.0,
                        inv_sqrt20,
                        inv_sqrt20,
                    ])),
                    regime,
                    checks: vec![Check::EquivalenceBelow(0.06)],
                }],
            })
        }
        // degree-2..6 combination with the two highest components truncated
        // entrywise at 3/sqrt(n)
        "figure2b" => {
            let (d, n) = if paper_scale { (200, 20_000) } else { (100, 5_000) };
            let regime = RegimeSpec::with_n(2, n as f64 / (d * d) as f64, d, n);
            Ok(Preset {
                name: "figure2b",
                panels: vec![Panel {
                    name: "truncated",
                    kind: PanelKind::Simulate,
                    recipe: MatrixRecipe::TruncatedCombo {
                        mu: vec![0.0, 0.0, 1.0, 0.25, 0.25, 0.25, 0.25],
                        truncate_from: 5,
                        threshold: 3.0,
                    },
                    regime,
                    checks: vec![Check::KsBelow(0.08)],
                }],
            })
        }
        // soft-threshold kernel across the three scaling regimes
        "figure3-linear" => {
            let d = if paper_scale { 12_000 } else { 2_000 };
            Ok(figure3_panel(1, d, vec![Check::KsBelow(0.05)]))
        }
        "figure3-quadratic" => {
            let d = if paper_scale { 300 } else { 100 };
            Ok(figure3_panel(2, d, vec![Check::OutlierCountWithin(0.10)]))
        }
        "figure3-cubic" => {
            let d = if paper_scale { 50 } else { 36 };
            Ok(figure3_panel(3, d, vec![Check::OutlierCountWithin(0.10)]))
        }
        other => Err(AppError::config(format!(
            "unknown preset `{other}`; available: {}",
            PRESET_NAMES.join(", ")
        ))),
    }
}

fn figure3_panel(ell: usize, d: usize, checks: Vec<Check>) -> Preset {
    let regime = RegimeSpec::new(ell, 0.15, d);
    let name: &'static str = match ell {
        1 => "figure3-linear",
        2 => "figure3-quadratic",
        _ => "figure3-cubic",
    };
    Preset {
        name,
        panels: vec![Panel {
            name: "threshold",
            kind: if ell == 1 { PanelKind::Simulate } else { PanelKind::Figure3 },
            recipe: MatrixRecipe::Kernel(KernelFn::SoftThreshold(1.0)),
            regime,
            checks,
        }],
    }
}
