//! The limiting spectral law: the self-consistent equation for the Stieltjes
//! transform of a free additive convolution of a shifted Marchenko-Pastur law
//! with a semicircle law, solved in closed form, plus density/CDF inversion
//! and the two pure laws as oracles.
//!
//! The transform `m(z)` is the unique upper-half-plane solution of
//!
//! ```text
//! m (z + t1 m / (1 + t2 m) + t3 m) + 1 = 0,
//! ```
//!
//! equivalently a root of the cubic
//! `t3 t2 m^3 + (t1 + t3 + z t2) m^2 + (z + t2) m + 1`. Roots are found by
//! the closed-form solution of the (degree-reduced) polynomial and polished
//! by Newton steps; the upper-half-plane root is selected, by continuity
//! along the grid during density sweeps.

use crate::error::{Error, Result};
use crate::kernelmat::RegimeSpec;
use crate::orthopoly::KernelCoefficients;
use num_complex::Complex64;

const DEGENERATE_EPS: f64 = 1e-14;
/// Candidacy threshold for the upper-half-plane root; anything below is
/// treated as real (the factored root at `-1/t2` is exactly real).
const UPPER_IM_EPS: f64 = 1e-14;

/// The triple `(t1, t2, t3)` plus the regime `(ell, kappa)` that determines
/// the limiting law: `t1 = mu_ell^2`, `t2 = mu_ell sqrt(ell! kappa)` (sign of
/// `mu_ell` preserved), `t3` the residual variance above degree `ell`.
#[derive(Debug, Clone, Copy)]
pub struct EquivParams {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub ell: usize,
    pub kappa: f64,
}

impl EquivParams {
    pub fn new(t1: f64, t2: f64, t3: f64, ell: usize, kappa: f64) -> Self {
        assert!(t1 >= 0.0 && t3 >= 0.0, "variance parameters must be nonnegative");
        Self { t1, t2, t3, ell, kappa }
    }

    /// Convenience constructor for bare `(t1, t2, t3)` triples in tests and
    /// randomized sweeps.
    pub fn bare(t1: f64, t2: f64, t3: f64) -> Self {
        Self::new(t1, t2, t3, 1, 1.0)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// Derives the equation parameters from kernel expansion coefficients in a
/// given regime. `t3 = sigma^2 - sum_{k <= ell} mu_k^2`, which reduces to the
/// tail sum of squares for exact polynomial expansions; small negative values
/// (within `1e-8`) are clamped to zero.
pub fn params_from_kernel(coeffs: &KernelCoefficients, regime: &RegimeSpec) -> Result<EquivParams> {
    let ell = regime.ell;
    assert!(
        ell <= coeffs.max_degree(),
        "coefficients must extend at least to degree ell = {ell}"
    );
    let mu_ell = coeffs.mu[ell];
    let t1 = mu_ell * mu_ell;
    let t2 = mu_ell * (factorial(ell) * regime.kappa).sqrt();
    let head: f64 = coeffs.mu[..=ell].iter().map(|m| m * m).sum();
    let mut t3 = coeffs.sigma_sq - head;
    if t3 < 0.0 {
        if t3 < -1e-8 {
            return Err(Error::NegativeVariance { value: t3 });
        }
        t3 = 0.0;
    }
    Ok(EquivParams { t1, t2, t3, ell, kappa: regime.kappa })
}

/// Residual of the self-consistent equation at `m`.
pub fn equation_residual(m: Complex64, z: Complex64, p: &EquivParams) -> f64 {
    let denom = 1.0 + p.t2 * m;
    (m * (z + p.t1 * m / denom + p.t3 * m) + 1.0).norm()
}

/// Solution together with selection diagnostics.
#[derive(Debug, Clone)]
pub struct MSolution {
    pub m: Complex64,
    /// All finite polished roots of the (reduced) polynomial.
    pub candidates: Vec<Complex64>,
    /// More than one candidate had positive imaginary part; selection fell
    /// back to residual consistency.
    pub ambiguous: bool,
}

fn cubic_roots(c3: Complex64, c2: Complex64, c1: Complex64, c0: Complex64) -> Vec<Complex64> {
    let b = c2 / c3;
    let c = c1 / c3;
    let d = c0 / c3;
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let s = disc.sqrt();
    // pick the branch with the larger magnitude to avoid cancellation
    let u3a = -q / 2.0 + s;
    let u3b = -q / 2.0 - s;
    let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    if u3.norm() == 0.0 {
        // triple root
        return vec![-shift; 3];
    }
    let u = u3.powf(1.0 / 3.0);
    (0..3)
        .map(|j| {
            let rot = omega.powu(j as u32);
            let uj = u * rot;
            let vj = -p / (3.0 * uj);
            uj + vj - shift
        })
        .collect()
}

fn quadratic_roots(c2: Complex64, c1: Complex64, c0: Complex64) -> Vec<Complex64> {
    let disc = (c1 * c1 - 4.0 * c2 * c0).sqrt();
    // stable variant: pick the sign that avoids cancellation in -b -+ disc
    let q = if (c1.conj() * disc).re >= 0.0 { -(c1 + disc) / 2.0 } else { -(c1 - disc) / 2.0 };
    let mut roots = Vec::with_capacity(2);
    if q.norm() > 0.0 {
        roots.push(q / c2);
        roots.push(c0 / q);
    } else {
        roots.push(Complex64::new(0.0, 0.0));
        roots.push(-c1 / c2);
    }
    roots
}

/// Polynomial coefficients `(c3, c2, c1, c0)` of the expanded equation.
fn equation_coefficients(z: Complex64, p: &EquivParams) -> (f64, Complex64, Complex64, Complex64) {
    (
        p.t3 * p.t2,
        Complex64::new(p.t1 + p.t3, 0.0) + z * p.t2,
        z + p.t2,
        Complex64::new(1.0, 0.0),
    )
}

fn polished_candidates(z: Complex64, p: &EquivParams) -> Vec<Complex64> {
    let (c3, c2, c1, c0) = equation_coefficients(z, p);
    let mut roots = if c3.abs() < DEGENERATE_EPS {
        if c2.norm() < DEGENERATE_EPS * (1.0 + z.norm()) {
            // linear: (z + t2) m + 1 = 0
            vec![-c0 / c1]
        } else {
            quadratic_roots(c2, c1, c0)
        }
    } else {
        cubic_roots(Complex64::new(c3, 0.0), c2, c1, c0)
    };

    // Newton polish on the polynomial
    let c3c = Complex64::new(c3, 0.0);
    for m in roots.iter_mut() {
        for _ in 0..3 {
            let f = ((c3c * *m + c2) * *m + c1) * *m + c0;
            let fp = (3.0 * c3c * *m + 2.0 * c2) * *m + c1;
            if fp.norm() == 0.0 {
                break;
            }
            let step = f / fp;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *m -= step;
        }
    }
    roots.retain(|m| m.re.is_finite() && m.im.is_finite());
    roots
}

/// Full solve with diagnostics.
pub fn solve_m_detailed(z: Complex64, p: &EquivParams) -> Result<MSolution> {
    assert!(z.im > 0.0, "need Im z > 0");
    let candidates = polished_candidates(z, p);
    let upper: Vec<Complex64> = candidates.iter().copied().filter(|m| m.im > UPPER_IM_EPS).collect();
    match upper.len() {
        0 => Err(Error::NoUpperRoot { z }),
        1 => Ok(MSolution { m: upper[0], candidates, ambiguous: false }),
        _ => {
            // uniqueness is guaranteed in theory; fall back to the root most
            // consistent with the equation
            let m = upper
                .iter()
                .copied()
                .min_by(|a, b| {
                    equation_residual(*a, z, p)
                        .partial_cmp(&equation_residual(*b, z, p))
                        .unwrap()
                })
                .unwrap();
            Ok(MSolution { m, candidates, ambiguous: true })
        }
    }
}

/// The unique `m(z)` with `Im m > 0` solving the self-consistent equation.
pub fn solve_m(z: Complex64, p: &EquivParams) -> Result<Complex64> {
    solve_m_detailed(z, p).map(|s| s.m)
}

/// Point mass attached to a density curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Sampled limiting density with an optional point mass.
#[derive(Debug, Clone)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub atom: Option<Atom>,
}

impl DensityCurve {
    /// Trapezoid mass of the continuous part plus the atom.
    pub fn total_mass(&self) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.values[i] + self.values[i - 1]) * (self.grid[i] - self.grid[i - 1]);
        }
        acc + self.atom.map_or(0.0, |a| a.mass)
    }
}

/// The pure-MP point mass for `t3 = 0` parameter sets (absorbed into the
/// semicircle component otherwise): mass `(1 - psi)_+` at `-t1/t2` with
/// `psi = t1/t2^2`.
fn mp_atom(p: &EquivParams) -> Option<Atom> {
    if p.t3 != 0.0 {
        return None;
    }
    if p.t2.abs() < DEGENERATE_EPS {
        if p.t1 < DEGENERATE_EPS {
            // the degenerate zero law: all mass at the origin
            return Some(Atom { location: 0.0, mass: 1.0 });
        }
        return None; // pure semicircle of variance t1
    }
    let psi = p.t1 / (p.t2 * p.t2);
    if psi < 1.0 {
        Some(Atom { location: -p.t1 / p.t2, mass: 1.0 - psi })
    } else {
        None
    }
}

/// Continuous density at `x` from the boundary value `Im m(x + i eta) / pi`,
/// with the atom's Lorentzian contribution removed exactly when present.
/// Values below double precision are snapped to zero so that the subtraction
/// residue cannot leak phantom mass into CDFs.
fn density_from_m(x: f64, m: Complex64, eta: f64, atom: Option<Atom>) -> f64 {
    let mut im = m.im;
    let mut floor = 1e-16f64;
    if let Some(a) = atom {
        let dx = x - a.location;
        let lorentzian = a.mass * eta / (dx * dx + eta * eta);
        im -= lorentzian;
        // cancellation noise scales with the subtracted term
        floor = floor.max(1e-13 * lorentzian);
    }
    let rho = im / std::f64::consts::PI;
    if rho < floor {
        0.0
    } else {
        rho
    }
}

/// Limiting density on a grid, by continuity-tracked root selection along the
/// sweep at height `eta` (default `1e-7` in callers).
pub fn limiting_density(grid: &[f64], p: &EquivParams, eta: f64) -> Result<DensityCurve> {
    assert!(eta > 0.0, "need eta > 0");
    let atom = mp_atom(p);
    let mut values = Vec::with_capacity(grid.len());
    let mut prev: Option<Complex64> = None;
    for &x in grid {
        let z = Complex64::new(x, eta);
        let m = sweep_root(z, p, prev)?;
        values.push(density_from_m(x, m, eta, atom));
        prev = Some(m);
    }
    Ok(DensityCurve { grid: grid.to_vec(), values, atom })
}

/// Root selection for near-real sweeps: prefer upper-half-plane roots; among
/// several, stay continuous with the previous grid point (falling back to the
/// largest imaginary part at the anchor).
fn sweep_root(z: Complex64, p: &EquivParams, prev: Option<Complex64>) -> Result<Complex64> {
    let candidates = polished_candidates(z, p);
    if candidates.is_empty() {
        return Err(Error::NoUpperRoot { z });
    }
    let upper: Vec<Complex64> = candidates.iter().copied().filter(|m| m.im > UPPER_IM_EPS).collect();
    let pool = if upper.is_empty() { &candidates } else { &upper };
    let chosen = match prev {
        Some(q) => pool
            .iter()
            .copied()
            .min_by(|a, b| (a - q).norm().partial_cmp(&(b - q).norm()).unwrap())
            .unwrap(),
        None => pool
            .iter()
            .copied()
            .max_by(|a, b| a.im.partial_cmp(&b.im).unwrap())
            .unwrap(),
    };
    Ok(chosen)
}

/// Conservative bracket containing the support of the continuous part.
pub fn support_bracket(p: &EquivParams) -> (f64, f64) {
    let sc = 2.0 * p.t3.sqrt();
    let (mp_lo, mp_hi) = if p.t2.abs() < DEGENERATE_EPS {
        let r = 2.0 * p.t1.sqrt();
        (-r, r)
    } else {
        let spread = 2.0 * p.t1.sqrt() * p.t2.signum();
        let (a, b) = (p.t2 - spread, p.t2 + spread);
        let atom_loc = -p.t1 / p.t2;
        (a.min(b).min(atom_loc).min(0.0), a.max(b).max(atom_loc).max(0.0))
    };
    let pad = 0.1 + 0.02 * (mp_hi - mp_lo + 2.0 * sc);
    (mp_lo - sc - pad, mp_hi + sc + pad)
}

const DEFAULT_ETA: f64 = 1e-7;

/// CDF of the limiting law at `x`: adaptive quadrature of the continuous
/// density from below the support plus any atom mass at or below `x`.
pub fn limiting_cdf(x: f64, p: &EquivParams) -> Result<f64> {
    let atom = mp_atom(p);
    let (lo, hi) = support_bracket(p);
    let mut acc = 0.0;
    if let Some(a) = atom {
        if a.location <= x {
            acc += a.mass;
        }
    }
    if x <= lo {
        return Ok(acc.min(1.0));
    }
    let upper = x.min(hi);
    let f = |t: f64| -> Result<f64> {
        let m = solve_m_for_density(Complex64::new(t, DEFAULT_ETA), p)?;
        Ok(density_from_m(t, m, DEFAULT_ETA, atom))
    };
    let integral = adaptive_simpson(&f, lo, upper, 1e-6, 44)?;
    Ok((acc + integral).clamp(0.0, 1.0))
}

/// Near-real solve without a continuity anchor: the Herglotz root when one
/// exists, otherwise the argmax-imaginary candidate (clamped later).
fn solve_m_for_density(z: Complex64, p: &EquivParams) -> Result<Complex64> {
    sweep_root(z, p, None)
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<f64> {
    let fa = f(a)?;
    let fb = f(b)?;
    let mid = 0.5 * (a + b);
    let fm = f(mid)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let lm = 0.5 * (a + mid);
    let rm = 0.5 * (mid + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 {
        // integrable edge singularities exhaust the depth budget with a
        // negligible remaining discrepancy; anything larger is a failure
        if !delta.is_finite() || delta.abs() > 1e-3 {
            return Err(Error::Integration(format!(
                "adaptive quadrature failed to converge on [{a}, {b}]"
            )));
        }
        return Ok(left + right + delta / 15.0);
    }
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    let l = simpson_rec(f, a, mid, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = simpson_rec(f, mid, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(l + r)
}

/// Shifted Marchenko-Pastur density with aspect ratio `psi` and scale `t`:
/// continuous part
/// `sqrt([(2 sqrt(psi) + x/t - 1)(2 sqrt(psi) - x/t + 1)]_+) / (2 pi sign(t) (x + t psi))`
/// plus a point mass `(1 - psi)_+` at `x = -t psi`.
pub fn mp_density(x: f64, psi: f64, t: f64) -> (f64, Option<Atom>) {
    assert!(psi > 0.0, "need psi > 0");
    assert!(t != 0.0, "need t != 0");
    let atom = if psi < 1.0 { Some(Atom { location: -t * psi, mass: 1.0 - psi }) } else { None };
    let u = x / t;
    let s = 2.0 * psi.sqrt();
    let num = (s + u - 1.0) * (s - u + 1.0);
    if num <= 0.0 {
        return (0.0, atom);
    }
    let denom = 2.0 * std::f64::consts::PI * t.signum() * (x + t * psi);
    (num.sqrt() / denom, atom)
}

/// CDF of the shifted MP law by quadrature over its exact support.
pub fn mp_cdf(x: f64, psi: f64, t: f64) -> Result<f64> {
    let (lo_u, hi_u) = (1.0 - 2.0 * psi.sqrt(), 1.0 + 2.0 * psi.sqrt());
    let (e1, e2) = (t * lo_u, t * hi_u);
    let (lo, hi) = (e1.min(e2), e1.max(e2));
    let mut acc = 0.0;
    if psi < 1.0 && -t * psi <= x {
        acc += 1.0 - psi;
    }
    if x <= lo {
        return Ok(acc.min(1.0));
    }
    let f = |v: f64| -> Result<f64> { Ok(mp_density(v, psi, t).0) };
    let integral = adaptive_simpson(&f, lo, x.min(hi), 1e-7, 44)?;
    Ok((acc + integral).clamp(0.0, 1.0))
}

/// Standard semicircle density `sqrt((4 - x^2)_+) / (2 pi)`.
pub fn semicircle_density(x: f64) -> f64 {
    let v = 4.0 - x * x;
    if v <= 0.0 {
        0.0
    } else {
        v.sqrt() / (2.0 * std::f64::consts::PI)
    }
}

/// Closed-form semicircle CDF.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        use std::f64::consts::PI;
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI
    }
}

/// Precomputed CDF of the limiting law on a fine grid, for bulk evaluations
/// such as Kolmogorov-Smirnov statistics; the atom enters as a jump.
#[derive(Debug, Clone)]
pub struct LimitingLaw {
    params: EquivParams,
    curve: DensityCurve,
    cumulative: Vec<f64>,
}

impl LimitingLaw {
    pub fn new(params: EquivParams) -> Result<Self> {
        Self::with_resolution(params, 16001)
    }

    pub fn with_resolution(params: EquivParams, points: usize) -> Result<Self> {
        assert!(points >= 2);
        let (lo, hi) = support_bracket(&params);
        let step = (hi - lo) / (points - 1) as f64;
        let grid: Vec<f64> = (0..points).map(|i| lo + i as f64 * step).collect();
        let curve = limiting_density(&grid, &params, DEFAULT_ETA)?;
        let mut cumulative = Vec::with_capacity(points);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 1..points {
            acc += 0.5 * (curve.values[i] + curve.values[i - 1]) * step;
            cumulative.push(acc);
        }
        Ok(Self { params, curve, cumulative })
    }

    pub fn params(&self) -> &EquivParams {
        &self.params
    }

    pub fn curve(&self) -> &DensityCurve {
        &self.curve
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let grid = &self.curve.grid;
        let mut acc = 0.0;
        if let Some(a) = self.curve.atom {
            if a.location <= x {
                acc += a.mass;
            }
        }
        let cont = if x <= grid[0] {
            0.0
        } else if x >= *grid.last().unwrap() {
            *self.cumulative.last().unwrap()
        } else {
            let step = grid[1] - grid[0];
            let idx = ((x - grid[0]) / step).floor() as usize;
            let idx = idx.min(grid.len() - 2);
            let frac = (x - grid[idx]) / step;
            self.cumulative[idx] + frac * (self.cumulative[idx + 1] - self.cumulative[idx])
        };
        (acc + cont).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_parameter_free_case() {
        let p = EquivParams::bare(0.0, 0.0, 0.0);
        let m = solve_m(Complex64::new(0.0, 1.0), &p).unwrap();
        assert_abs_diff_eq!(m.re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.im, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn semicircle_case_at_z_eq_i() {
        let p = EquivParams::bare(0.0, 0.0, 1.0);
        let m = solve_m(Complex64::new(0.0, 1.0), &p).unwrap();
        let expect = (5f64.sqrt() - 1.0) / 2.0;
        assert_abs_diff_eq!(m.re, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.im, expect, epsilon = 1e-12);
    }

    #[test]
    fn mp_case_at_z_eq_i() {
        let p = EquivParams::bare(1.0, 1.0, 0.0);
        let m = solve_m(Complex64::new(0.0, 1.0), &p).unwrap();
        assert_abs_diff_eq!(m.re, -0.10697, epsilon = 5e-5);
        assert_abs_diff_eq!(m.im, 0.63602, epsilon = 5e-5);
    }

    #[test]
    fn semicircle_reduction_matches_closed_form() {
        let p = EquivParams::bare(0.0, 0.0, 1.0);
        for i in 0..200 {
            let x = -3.0 + 6.0 * i as f64 / 199.0;
            let z = Complex64::new(x, 0.37);
            let m = solve_m(z, &p).unwrap();
            let closed = (-z + (z * z - 4.0).sqrt()) / 2.0;
            let closed = if closed.im > 0.0 { closed } else { (-z - (z * z - 4.0).sqrt()) / 2.0 };
            assert!((m - closed).norm() < 1e-10, "x = {x}");
        }
    }

    #[test]
    fn density_closed_form_values() {
        let sc = EquivParams::bare(0.0, 0.0, 1.0);
        let curve = limiting_density(&[0.0, 2.5], &sc, 1e-7).unwrap();
        assert_abs_diff_eq!(curve.values[0], 1.0 / std::f64::consts::PI, epsilon = 1e-4);
        assert!(curve.values[1].abs() < 1e-3);

        let mp = EquivParams::bare(1.0, 1.0, 0.0);
        let curve = limiting_density(&[1.0], &mp, 1e-7).unwrap();
        assert_abs_diff_eq!(curve.values[0], 0.5 / std::f64::consts::PI, epsilon = 1e-4);
    }

    #[test]
    fn mp_density_examples() {
        let (rho, atom) = mp_density(1.0, 1.0, 1.0);
        assert_abs_diff_eq!(rho, 0.5 / std::f64::consts::PI, epsilon = 1e-14);
        assert!(atom.is_none());

        let (rho_out, _) = mp_density(5.0, 1.0, 1.0);
        assert_eq!(rho_out, 0.0);

        let (_, atom) = mp_density(0.0, 0.5, 1.0);
        let atom = atom.unwrap();
        assert_abs_diff_eq!(atom.mass, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(atom.location, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn semicircle_density_examples() {
        assert_abs_diff_eq!(semicircle_density(0.0), 1.0 / std::f64::consts::PI, epsilon = 1e-15);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(-2.0), 0.0);
        assert_abs_diff_eq!(
            semicircle_density(1.0),
            3f64.sqrt() / (2.0 * std::f64::consts::PI),
            epsilon = 1e-15
        );
    }

    #[test]
    fn limiting_cdf_examples() {
        let sc = EquivParams::bare(0.0, 0.0, 1.0);
        assert_abs_diff_eq!(limiting_cdf(0.0, &sc).unwrap(), 0.5, epsilon = 1e-4);
        assert_abs_diff_eq!(limiting_cdf(-2.5, &sc).unwrap(), 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(limiting_cdf(2.5, &sc).unwrap(), 1.0, epsilon = 1e-3);

        // shifted MP with psi = 1, t = 1 has support [-1, 3]
        let mp = EquivParams::bare(1.0, 1.0, 0.0);
        assert!(limiting_cdf(-1.0, &mp).unwrap() < 1e-3);
        assert!((limiting_cdf(3.2, &mp).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn params_from_kernel_examples() {
        use crate::orthopoly::{BasisKind, KernelCoefficients};
        // single unit coefficient at ell = 1, kappa = 1
        let coeffs = KernelCoefficients::from_basis_coefficients(
            vec![0.0, 1.0],
            BasisKind::FiniteD(50),
        );
        let regime = RegimeSpec::with_n(1, 1.0, 50, 50);
        let p = params_from_kernel(&coeffs, &regime).unwrap();
        assert_eq!((p.t1, p.t2, p.t3), (1.0, 1.0, 0.0));

        // sign of mu_ell flows into t2
        let coeffs = KernelCoefficients::from_basis_coefficients(
            vec![0.0, 0.0, -1.0, 0.5],
            BasisKind::FiniteD(50),
        );
        let regime = RegimeSpec::with_n(2, 0.05, 50, 125);
        let p = params_from_kernel(&coeffs, &regime).unwrap();
        assert_abs_diff_eq!(p.t1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.t2, -(2.0 * 0.05f64).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.t3, 0.25, epsilon = 1e-15);
        assert!((p.t2 * p.t2 - p.t1 * 2.0 * 0.05).abs() < 1e-10);
    }

    #[test]
    fn soft_threshold_params_match_quadrature_values() {
        use crate::orthopoly::{kernel_coeffs_hermite, soft_threshold};
        let coeffs = kernel_coeffs_hermite(soft_threshold(1.0), 6);
        let regime = RegimeSpec::with_n(2, 0.15, 100, 1500);
        let p = params_from_kernel(&coeffs, &regime).unwrap();
        assert!(p.t1 < 1e-8, "t1 = {}", p.t1);
        assert!((p.t3 - 0.0500).abs() < 2e-3, "t3 = {}", p.t3);
    }

    #[test]
    fn zero_law_has_unit_atom_and_no_density() {
        let p = EquivParams::bare(0.0, 0.0, 0.0);
        let grid: Vec<f64> = (0..101).map(|i| -1.0 + i as f64 * 0.02).collect();
        let curve = limiting_density(&grid, &p, 1e-7).unwrap();
        assert_eq!(curve.atom, Some(Atom { location: 0.0, mass: 1.0 }));
        for &v in &curve.values {
            assert!(v < 1e-6, "smoothed density should vanish, got {v}");
        }
    }
}
