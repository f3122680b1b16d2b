use abrikosov::lattice_sums::gamma_01;
use abrikosov::quadrature_oracle::{avg_abs4, gamma_k_quadrature};
use abrikosov::stability_functions::*;
use abrikosov::{Characteristic, ShapeParameter};

// reference values from an independent double-precision lattice-sum evaluation
const GAMMA_HEX: f64 = 0.681_147_5;
const GAMMA_SQUARE: f64 = 0.488_913_1;
const BETA_HEX: f64 = 1.159_595_266_963_9;
const BETA_SQUARE: f64 = 1.180_340_599_016_1;

#[test]
fn beta_known_values() {
    let b = beta(&ShapeParameter::hexagonal(), 1e-13).unwrap();
    assert!((b.value - BETA_HEX).abs() < 1e-12);
    let b = beta(&ShapeParameter::square(), 1e-13).unwrap();
    assert!((b.value - BETA_SQUARE).abs() < 1e-12);
}

#[test]
fn beta_matches_quadrature() {
    let tau = ShapeParameter::new(0.21, 1.37).unwrap();
    let s = gamma_01(&tau, 1e-12).unwrap().value;
    let q = avg_abs4(&tau, 1e-11).unwrap().value;
    assert!((s - q).abs() < 1e-10, "{s} {q}");
}

#[test]
fn kappa_c_hexagonal() {
    let k = kappa_c(&ShapeParameter::hexagonal(), 1e-12).unwrap();
    let want = (0.5 * (1.0 - 1.0 / BETA_HEX)).sqrt();
    assert!((k.value - want).abs() < 1e-11);
    assert!(k.remainder_bound < 1e-10);
}

#[test]
fn gamma_min_hexagonal() {
    let g = gamma(&ShapeParameter::hexagonal(), 1e-10).unwrap();
    assert!((g.value.value - GAMMA_HEX).abs() < 1e-6, "{}", g.value.value);
    let corner = Characteristic::new(1.0 / 3.0, -1.0 / 3.0);
    assert!(g.argmin_q.distance_mod(&corner) < 1e-4, "{:?}", g.argmin_q);
    for (_, v) in &g.multistart_trace {
        assert!(g.value.value <= v + 1e-9);
    }
}

#[test]
fn gamma_min_square() {
    let g = gamma(&ShapeParameter::square(), 1e-10).unwrap();
    assert!((g.value.value - GAMMA_SQUARE).abs() < 1e-6, "{}", g.value.value);
    assert!(g.argmin_q.distance_mod(&Characteristic::new(0.5, 0.5)) < 1e-4, "{:?}", g.argmin_q);
}

#[test]
fn gamma_k_matches_quadrature() {
    let tau = ShapeParameter::new(-0.3, 1.15).unwrap();
    for ch in [Characteristic::new(0.17, 0.41), Characteristic::new(-0.45, 0.05)] {
        let s = gamma_k(&tau, &ch, 1e-12).unwrap().gamma_k.value;
        let q = gamma_k_quadrature(&tau, &ch, 1e-10).unwrap();
        assert!((s - q).abs() < 1e-9, "{s} {q}");
    }
}

#[test]
fn symmetries_within_bounds() {
    let tau = ShapeParameter::new(0.12, 1.3).unwrap();
    let res = symmetry_residuals(&tau, &Characteristic::new(0.23, -0.31), 1e-12).unwrap();
    assert_eq!(res.len(), 7);
    for (name, r) in res {
        assert!(r.passes(), "{name}: {r:?}");
    }
}

#[test]
fn classify_regimes() {
    let hex = ShapeParameter::hexagonal();
    let v = classify(&hex, 1.0, 1.0, 1e-8, DEFAULT_B_RATIO).unwrap();
    assert_eq!(v.verdict, Verdict::AsymptoticallyStable);
    let v = classify(&hex, 0.6, 0.36, 1e-8, DEFAULT_B_RATIO).unwrap();
    assert_eq!(v.verdict, Verdict::EnergeticallyUnstable);
    let v = classify(&hex, 1.0, 5.0, 1e-8, DEFAULT_B_RATIO).unwrap();
    assert_eq!(v.verdict, Verdict::OutsideRegime);
    let v = classify(&ShapeParameter::new(0.0, 2.5).unwrap(), 1.0, 1.0, 1e-8, DEFAULT_B_RATIO).unwrap();
    assert_eq!(v.verdict, Verdict::EnergeticallyUnstable);
}

#[test]
fn critical_points() {
    let r = critical_point_residuals(&ShapeParameter::hexagonal()).unwrap();
    for (name, v) in &r {
        if name.starts_with("grad_k") || name == "grad_tau_hexagonal" || name == "d_im_tau_square" {
            assert!(*v < 1e-3, "{name} {v}");
        }
    }
    let jump = r["d_re_tau_square_right"] - r["d_re_tau_square_left"];
    assert!(jump.abs() > 0.5, "{jump}");
}
