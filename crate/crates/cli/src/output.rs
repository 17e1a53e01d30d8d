//! Canonical output files: CSV data, the metrics report, and helpers shared
//! by the plot writer. All float formatting uses the shortest round-trip
//! representation, so identical numbers give identical bytes.

use crate::error::AppError;
use kspec::spectra::Esd;
use kspec::theory::DensityCurve;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

/// The stable metrics schema; extension blocks for specific run kinds are
/// appended after `params` and are absent otherwise.
#[derive(Debug, Clone, Serialize)]
pub struct Metrics {
    pub ks: f64,
    pub stieltjes_sup_error: f64,
    pub n: usize,
    pub d: usize,
    pub ell: usize,
    pub kappa: f64,
    pub seed: u64,
    pub runtime_ms: u64,
    pub params: ParamsOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outliers: Option<OutliersOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsOut {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceOut {
    pub ks_ab: f64,
    pub ks_a_limit: f64,
    pub ks_b_limit: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutliersOut {
    pub threshold: f64,
    pub count: usize,
    pub expected: usize,
    pub bulk_edge: f64,
    pub spike_location: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleOut {
    pub repeats: usize,
    pub ks_mean: f64,
    pub ks_max: f64,
}

pub fn write_eigenvalues_csv(path: &Path, esd: &Esd) -> Result<(), AppError> {
    let mut out = String::with_capacity(esd.n() * 24 + 16);
    out.push_str("index,lambda\n");
    for (i, v) in esd.eigenvalues().iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_density_csv(path: &Path, curve: &DensityCurve) -> Result<(), AppError> {
    let mut out = String::with_capacity(curve.grid.len() * 24 + 16);
    out.push_str("x,rho\n");
    for (x, rho) in curve.grid.iter().zip(&curve.values) {
        out.push_str(&format!("{x},{rho}\n"));
    }
    if let Some(atom) = curve.atom {
        out.push_str(&format!("# atom,{},{}\n", atom.location, atom.mass));
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_metrics_json(path: &Path, metrics: &Metrics) -> Result<(), AppError> {
    let mut file = std::fs::File::create(path)?;
    let text = serde_json::to_string_pretty(metrics)
        .map_err(|e| AppError::runtime(format!("metrics serialization failed: {e}")))?;
    file.write_all(text.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use kspec::theory::Atom;

    #[test]
    fn csv_layouts() {
        let dir = tempfile::tempdir().unwrap();
        let esd = Esd::from_eigenvalues(vec![0.5, -1.25]);
        let p = dir.path().join("eigenvalues.csv");
        write_eigenvalues_csv(&p, &esd).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "index,lambda\n0,-1.25\n1,0.5\n");

        let curve = DensityCurve {
            grid: vec![0.0, 1.0],
            values: vec![0.25, 0.5],
            atom: Some(Atom { location: -0.5, mass: 0.125 }),
        };
        let p = dir.path().join("density.csv");
        write_density_csv(&p, &curve).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "x,rho\n0,0.25\n1,0.5\n# atom,-0.5,0.125\n");
    }

    #[test]
    fn metrics_key_order_is_stable() {
        let metrics = Metrics {
            ks: 0.01,
            stieltjes_sup_error: 0.02,
            n: 10,
            d: 5,
            ell: 2,
            kappa: 0.15,
            seed: 0,
            runtime_ms: 1,
            params: ParamsOut { t1: 1.0, t2: 0.5, t3: 0.0 },
            equivalence: None,
            outliers: None,
            ensemble: None,
        };
        let text = serde_json::to_string(&metrics).unwrap();
        let keys: Vec<usize> = ["\"ks\"", "\"stieltjes_sup_error\"", "\"n\"", "\"d\"", "\"ell\"", "\"kappa\"", "\"seed\"", "\"runtime_ms\"", "\"params\""]
            .iter()
            .map(|k| text.find(k).unwrap())
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
    }
}
