//! Experiment configuration: a single TOML file with nested tables, plus the
//! command-line overrides applied on top.

use crate::error::AppError;
use kspec::kernel::KernelFn;
use kspec::kernelmat::RegimeSpec;
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    #[serde(default = "default_repeat")]
    pub repeat: usize,
    pub bins: Option<usize>,
    pub kernel: KernelConfig,
    pub regime: RegimeConfig,
    pub grid: Option<GridConfig>,
    pub rate: Option<RateConfig>,
}

fn default_eta() -> f64 {
    1e-7
}

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

fn default_repeat() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kind: String,
    pub degree: Option<usize>,
    pub tau: Option<f64>,
    pub value: Option<f64>,
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegimeConfig {
    pub ell: usize,
    pub kappa: f64,
    pub d: usize,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub d_list: Vec<usize>,
}

impl KernelConfig {
    pub fn to_kernel(&self) -> Result<KernelFn, AppError> {
        let need = |opt: Option<f64>, what: &str| {
            opt.ok_or_else(|| AppError::config(format!("kernel.{what} is required for kind = {}", self.kind)))
        };
        match self.kind.as_str() {
            "constant" => Ok(KernelFn::Constant(need(self.value, "value")?)),
            "identity" => Ok(KernelFn::Identity),
            "gegenbauer" => Ok(KernelFn::Gegenbauer(self.degree.ok_or_else(|| {
                AppError::config("kernel.degree is required for kind = gegenbauer")
            })?)),
            "hermite" => Ok(KernelFn::Hermite(self.degree.ok_or_else(|| {
                AppError::config("kernel.degree is required for kind = hermite")
            })?)),
            "soft_threshold" => {
                let tau = need(self.tau, "tau")?;
                if tau <= 0.0 {
                    return Err(AppError::config("kernel.tau must be positive"));
                }
                Ok(KernelFn::SoftThreshold(tau))
            }
            "polynomial" => {
                let coeffs = self
                    .coeffs
                    .clone()
                    .ok_or_else(|| AppError::config("kernel.coeffs is required for kind = polynomial"))?;
                if coeffs.is_empty() {
                    return Err(AppError::config("kernel.coeffs must not be empty"));
                }
                Ok(KernelFn::Polynomial(coeffs))
            }
            other => Err(AppError::config(format!("unknown kernel kind: {other}"))),
        }
    }
}

impl RegimeConfig {
    pub fn to_regime(&self) -> Result<RegimeSpec, AppError> {
        if self.ell < 1 {
            return Err(AppError::config("regime.ell must be >= 1"));
        }
        if !(self.kappa > 0.0) {
            return Err(AppError::config("regime.kappa must be positive"));
        }
        if self.d < 3 {
            return Err(AppError::config("regime.d must be >= 3"));
        }
        let regime = match self.n {
            Some(n) => {
                if n < 2 {
                    return Err(AppError::config("regime.n must be >= 2"));
                }
                RegimeSpec::with_n(self.ell, self.kappa, self.d, n)
            }
            None => RegimeSpec::new(self.ell, self.kappa, self.d),
        };
        Ok(regime)
    }
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: FileConfig = toml::from_str(&text)
            .map_err(|e| AppError::config(format!("cannot parse {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), AppError> {
        if let Some(g) = &self.grid {
            if !(g.min < g.max) {
                return Err(AppError::config("grid.min must be below grid.max"));
            }
            if g.points < 2 {
                return Err(AppError::config("grid.points must be >= 2"));
            }
        }
        if self.repeat < 1 {
            return Err(AppError::config("repeat must be >= 1"));
        }
        if !(self.eta > 0.0) {
            return Err(AppError::config("eta must be positive"));
        }
        if let Some(bins) = self.bins {
            if bins < 1 {
                return Err(AppError::config("bins must be >= 1"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_minimal_config() {
        let toml_text = r#"
            seed = 7
            [kernel]
            kind = "gegenbauer"
            degree = 2
            [regime]
            ell = 2
            kappa = 0.15
            d = 40
        "#;
        let cfg: FileConfig = toml::from_str(toml_text).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.repeat, 1);
        let kernel = cfg.kernel.to_kernel().unwrap();
        assert_eq!(kernel, KernelFn::Gegenbauer(2));
        let regime = cfg.regime.to_regime().unwrap();
        assert_eq!(regime.n, 240);
    }

    #[test]
    fn rejects_bad_kernels() {
        let cfg = KernelConfig {
            kind: "gegenbauer".into(),
            degree: None,
            tau: None,
            value: None,
            coeffs: None,
        };
        assert!(cfg.to_kernel().is_err());
        let cfg = KernelConfig {
            kind: "nosuch".into(),
            degree: None,
            tau: None,
            value: None,
            coeffs: None,
        };
        assert!(cfg.to_kernel().is_err());
    }
}
