//! Properties of the self-consistent solver: residual exactness, uniqueness
//! of the upper-half-plane root, reduction to the closed-form pure laws,
//! Herglotz continuity, total mass, and agreement with the finite-dimensional
//! fixed-point heuristic.

use kspec::kernelmat::RegimeSpec;
use kspec::orthopoly::{harmonic_dim, BasisKind, KernelCoefficients};
use kspec::theory::{
    equation_residual, limiting_density, mp_density, params_from_kernel, solve_m,
    solve_m_detailed, EquivParams, LimitingLaw,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn random_params(rng: &mut ChaCha12Rng) -> EquivParams {
    EquivParams::bare(
        rng.gen_range(0.0..4.0),
        rng.gen_range(-4.0..4.0),
        rng.gen_range(0.0..4.0),
    )
}

#[test]
fn residual_small_over_randomized_inputs() {
    let mut rng = ChaCha12Rng::seed_from_u64(100);
    for _ in 0..2000 {
        let p = random_params(&mut rng);
        let z = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(0.1..10.0));
        let m = solve_m(z, &p).unwrap();
        let r = equation_residual(m, z, &p);
        assert!(r < 1e-10 * (1.0 + z.norm()), "residual {r} at z = {z}, p = {p:?}");
        assert!(m.im > 0.0);
    }
}

#[test]
fn exactly_one_upper_half_plane_root() {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    for _ in 0..2000 {
        let p = random_params(&mut rng);
        let z = Complex64::new(rng.gen_range(-6.0..6.0), rng.gen_range(0.05..5.0));
        let sol = solve_m_detailed(z, &p).unwrap();
        let uppers = sol.candidates.iter().filter(|m| m.im > 1e-10).count();
        assert_eq!(uppers, 1, "z = {z}, p = {p:?}, candidates = {:?}", sol.candidates);
        assert!(!sol.ambiguous);
    }
}

#[test]
fn semicircle_reduction_on_a_dense_grid() {
    let p = EquivParams::bare(0.0, 0.0, 1.0);
    for i in 0..200 {
        let x = -4.0 + 8.0 * i as f64 / 199.0;
        for eta in [0.05, 0.5, 2.0] {
            let z = Complex64::new(x, eta);
            let m = solve_m(z, &p).unwrap();
            let root = (z * z - 4.0).sqrt();
            let closed = if ((-z + root) / 2.0).im > 0.0 { (-z + root) / 2.0 } else { (-z - root) / 2.0 };
            assert!((m - closed).norm() < 1e-10, "x = {x}, eta = {eta}");
        }
    }
}

#[test]
fn mp_reduction_matches_density_on_open_support() {
    // t3 = 0 cases with either sign of t2
    for (t1, t2) in [(1.0, 0.7), (1.0, -0.7), (0.25, 2.0), (2.0, -1.0)] {
        let p = EquivParams::bare(t1, t2, 0.0);
        let psi = t1 / (t2 * t2);
        let spread = 2.0 * t1.sqrt() * t2.signum();
        let (e1, e2) = (t2 - spread, t2 + spread);
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let margin = 0.02 * (hi - lo);
        let grid: Vec<f64> = (0..200)
            .map(|i| lo + margin + (hi - lo - 2.0 * margin) * i as f64 / 199.0)
            .collect();
        let curve = limiting_density(&grid, &p, 1e-9).unwrap();
        for (j, &x) in grid.iter().enumerate() {
            let (expect, _) = mp_density(x, psi, t2);
            assert!(
                (curve.values[j] - expect).abs() < 1e-6,
                "t1={t1} t2={t2} x={x}: {} vs {expect}",
                curve.values[j]
            );
        }
    }
}

#[test]
fn sweeps_are_herglotz_and_continuous() {
    let mut rng = ChaCha12Rng::seed_from_u64(102);
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let eta = rng.gen_range(0.05..0.5);
        let step = 0.01;
        let mut prev: Option<Complex64> = None;
        for i in 0..1200 {
            let x = -6.0 + i as f64 * step;
            let z = Complex64::new(x, eta);
            let m = solve_m(z, &p).unwrap();
            assert!(m.im > 0.0);
            if let Some(q) = prev {
                let bound = 10.0 * step / (eta * eta);
                assert!(
                    (m - q).norm() <= bound,
                    "branch jump at x = {x}: |dm| = {} > {bound}",
                    (m - q).norm()
                );
            }
            prev = Some(m);
        }
    }
}

#[test]
fn total_mass_of_the_limiting_law_is_one() {
    let mut rng = ChaCha12Rng::seed_from_u64(103);
    for _ in 0..12 {
        let p = random_params(&mut rng);
        let law = LimitingLaw::new(p).unwrap();
        let mass = law.curve().total_mass();
        assert!((mass - 1.0).abs() < 1e-3, "mass = {mass} for p = {p:?}");
    }
    // pure-MP path with an atom
    let p = EquivParams::bare(0.25, 1.0, 0.0);
    let law = LimitingLaw::new(p).unwrap();
    let atom = law.curve().atom.expect("psi = 0.25 < 1 must carry an atom");
    assert!((atom.mass - 0.75).abs() < 1e-12);
    assert!((atom.location + 0.25).abs() < 1e-12);
    assert!((law.curve().total_mass() - 1.0).abs() < 1e-3);
}

/// Fixed point of the dimension-`d` self-consistent equation with the exact
/// harmonic dimension counts, the heuristic the limit theorem sharpens:
/// `1/m = -z - sum_k mu_k^2 m / (1 + mu_k sqrt(n/N_k) m)`.
fn finite_dimensional_fixed_point(
    z: Complex64,
    mu: &[f64],
    d: usize,
    n: usize,
) -> Complex64 {
    let ratios: Vec<f64> = (0..mu.len())
        .map(|k| (n as f64 / harmonic_dim(k, d).unwrap() as f64).sqrt())
        .collect();
    let mut m = -Complex64::new(1.0, 0.0) / z;
    for _ in 0..500 {
        let mut shift = Complex64::new(0.0, 0.0);
        for (k, &mu_k) in mu.iter().enumerate() {
            if mu_k != 0.0 {
                shift += mu_k * mu_k * m / (1.0 + mu_k * ratios[k] * m);
            }
        }
        let next = -(z + shift).finv();
        if (next - m).norm() < 1e-13 {
            return next;
        }
        m = next;
    }
    m
}

#[test]
fn finite_dimensional_heuristic_converges_to_the_limit() {
    // quadratic regime with components below, at, and above ell
    let mu = vec![0.0, 0.3, 1.0, 0.5];
    let (ell, kappa, d) = (2usize, 0.15f64, 10_000usize);
    let n = (kappa * (d as f64).powi(2)).round() as usize;
    let coeffs = KernelCoefficients::from_basis_coefficients(mu.clone(), BasisKind::FiniteD(d));
    let regime = RegimeSpec::with_n(ell, kappa, d, n);
    let p = params_from_kernel(&coeffs, &regime).unwrap();
    let mut sup = 0.0f64;
    for i in 0..25 {
        let z = Complex64::new(-3.0 + 0.25 * i as f64, 1.0);
        let heuristic = finite_dimensional_fixed_point(z, &mu, d, n);
        let limit = solve_m(z, &p).unwrap();
        sup = sup.max((heuristic - limit).norm());
    }
    assert!(sup < 0.1, "sup difference = {sup}");
}
