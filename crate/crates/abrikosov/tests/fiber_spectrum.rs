use abrikosov::fiber_spectrum::*;
use abrikosov::stability_functions::gamma_k;
use abrikosov::{Characteristic, Error, ShapeParameter};

fn ws_vertex() -> Characteristic {
    Characteristic::new(1.0 / 3.0, -1.0 / 3.0)
}

#[test]
fn epsilon_examples() {
    assert_eq!(epsilon_of(1.0, 1.0, 1.1596).unwrap(), 0.0);
    let e = epsilon_of(1.0, 0.9, 1.1596).unwrap();
    assert!((e - 0.2152).abs() < 1e-4, "{e}");
    assert!(epsilon_of(1.0, 0.8, 1.1596).unwrap() > e);
    assert!(matches!(epsilon_of(1.0, 1.2, 1.1596), Err(Error::Regime(_))));
}

#[test]
fn a1_solves_both_equations() {
    for tau in [ShapeParameter::square(), ShapeParameter::new(0.2, 1.2).unwrap()] {
        let a = a1_fourier(&tau, 8).unwrap();
        let (r1, r2) = a.residuals().unwrap();
        assert!(r1 < 1e-6 && r2 < 1e-6, "{r1} {r2}");
        let zero = a.coeffs.iter().find(|c| c.0 == 0 && c.1 == 0).unwrap();
        assert_eq!(zero.3.norm(), 0.0);
    }
}

#[test]
fn a1_square_fourfold() {
    let a = a1_fourier(&ShapeParameter::square(), 4).unwrap();
    let get = |n: i64, m: i64| a.coeffs.iter().find(|c| c.0 == n && c.1 == m).unwrap().3.norm();
    for (n, m) in [(1, 0), (1, 1), (2, 1)] {
        assert!((get(n, m) - get(-m, n)).abs() < 1e-12);
    }
}

#[test]
fn f2_structure() {
    let tau = ShapeParameter::new(0.1, 1.3).unwrap();
    let q = Characteristic::new(0.2, 0.35);
    let f = f2_matrix(&tau, &q, 0.9, 1e-12).unwrap();
    assert!(f.is_hermitian(1e-15));
    let f = f2_matrix(&tau, &q, 0.5f64.sqrt(), 1e-12).unwrap();
    assert!(f.m[0][0].norm() < 1e-15 && f.m[0][1].norm() < 1e-15);
    let f = f2_matrix(&tau, &Characteristic::ZERO, 0.5f64.sqrt(), 1e-12).unwrap();
    assert!((f.m[0][0].re - 1.0).abs() < 1e-15);
}

#[test]
fn mu_plus_is_scaled_gamma_k() {
    let tau = ShapeParameter::new(0.1, 1.3).unwrap();
    let q = Characteristic::new(0.2, 0.35);
    for kappa in [0.4, 0.9, 1.7] {
        let mu = mu_pm(&tau, &q, kappa, 1e-12).unwrap();
        let g = gamma_k(&tau, &q, 1e-12).unwrap().gamma_k;
        let want = (kappa * kappa - 0.5) * g.value;
        assert!((mu.plus - want).abs() <= mu.remainder_bound + (kappa * kappa - 0.5).abs() * g.remainder_bound);
        let f = f2_matrix(&tau, &q, kappa, 1e-12).unwrap();
        let (lo, hi) = f.eigenvalues();
        let (a, b) = (mu.plus.min(mu.minus), mu.plus.max(mu.minus));
        assert!((lo - a).abs() < 1e-14 && (hi - b).abs() < 1e-14);
    }
    let mu = mu_pm(&ShapeParameter::hexagonal(), &ws_vertex(), 1.0, 1e-12).unwrap();
    assert!((mu.plus - 0.340_573_7).abs() < 1e-6, "{}", mu.plus);
}

#[test]
fn mu_star_examples() {
    let hex = ShapeParameter::hexagonal();
    assert_eq!(mu_star(&hex, 1.0, 1.0, 1e-8).unwrap().value, 0.0);
    let v = mu_star(&hex, 1.0, 0.99, 1e-8).unwrap().value;
    let e = epsilon_of(1.0, 0.99, 1.159_595_266_963_9).unwrap();
    assert!(v > 0.0);
    assert!((v - 0.99 * 0.5 * 0.681_147_5 * e * e).abs() < 1e-8);
}

#[test]
fn galerkin_unperturbed_spectrum() {
    let h = FiberHessian::assemble(&ShapeParameter::hexagonal(), &ws_vertex(), 1.0, GalerkinBasis::default()).unwrap();
    assert!(h.unperturbed_deviation() < 1e-10, "{}", h.unperturbed_deviation());
    assert!(h.f1_max() <= 1e-9);
    let s = h.spectrum(0.0).unwrap();
    assert!(s.eigenvalues[0].abs() < 1e-10 && s.eigenvalues[1].abs() < 1e-10 && s.eigenvalues[2] > 1.0);
}

#[test]
fn galerkin_k_zero_has_four_zero_modes() {
    let h = FiberHessian::assemble(
        &ShapeParameter::new(0.1, 1.1).unwrap(),
        &Characteristic::ZERO,
        1.0,
        GalerkinBasis { n_landau: 4, n_fourier: 2 },
    )
    .unwrap();
    let s = h.spectrum(0.0).unwrap();
    let zeros = s.eigenvalues.iter().filter(|v| v.abs() < 1e-10).count();
    assert_eq!(zeros, 4);
}

#[test]
fn galerkin_converges_to_mu() {
    let tau = ShapeParameter::hexagonal();
    let h = FiberHessian::assemble(&tau, &ws_vertex(), 1.0, GalerkinBasis::default()).unwrap();
    let mu = mu_pm(&tau, &ws_vertex(), 1.0, 1e-12).unwrap().plus;
    let errs: Vec<f64> = [0.08, 0.04, 0.02]
        .iter()
        .map(|e| h.spectrum(*e).unwrap().lambda_plus / (e * e) - mu)
        .collect();
    let c = errs[0].abs() / 0.08;
    assert!(errs[1].abs() <= c * 0.04 && errs[2].abs() <= c * 0.02, "{errs:?}");
    assert!(errs[2].abs() < 1e-3, "{errs:?}");
}

#[test]
fn galerkin_rejects_tiny_basis() {
    let r = FiberHessian::assemble(&ShapeParameter::square(), &ws_vertex(), 1.0, GalerkinBasis { n_landau: 2, n_fourier: 1 });
    assert!(matches!(r, Err(Error::Truncation(_))));
}
