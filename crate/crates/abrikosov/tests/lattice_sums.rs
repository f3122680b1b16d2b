use abrikosov::lattice_sums::*;
use abrikosov::quadrature_oracle::{avg_abs2_abs2, avg_cross};
use abrikosov::{Characteristic, Error, ShapeParameter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_reduced(rng: &mut ChaCha8Rng, im_max: f64) -> ShapeParameter {
    loop {
        let t = ShapeParameter::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.86..im_max)).unwrap();
        if t.norm_sqr() >= 1.0 {
            return t;
        }
    }
}

#[test]
fn zero_characteristic_reduces_to_beta() {
    let hex = ShapeParameter::hexagonal();
    let b = gamma_01(&hex, 1e-13).unwrap().value;
    assert!((gamma_q1(&hex, &Characteristic::ZERO, 1e-13).unwrap().value - b).abs() < 1e-13);
    let q2 = gamma_q2(&hex, &Characteristic::ZERO, 1e-13).unwrap().value;
    assert!((q2.re - b).abs() < 1e-13 && q2.im.abs() < 1e-13);
}

#[test]
fn integer_shift_and_negation() {
    let tau = ShapeParameter::new(0.2, 1.1).unwrap();
    let ch = Characteristic::new(0.3, -0.15);
    let v = gamma_q1(&tau, &ch, 1e-13).unwrap().value;
    assert!((gamma_q1(&tau, &Characteristic::new(1.3, -0.15), 1e-13).unwrap().value - v).abs() < 1e-12);
    let m = gamma_q2(&tau, &ch, 1e-13).unwrap().value.norm();
    assert!((gamma_q2(&tau, &ch.neg(), 1e-13).unwrap().value.norm() - m).abs() < 1e-12);
}

#[test]
fn certified_enclosure_under_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let tau = random_reduced(&mut rng, 3.0);
        let ch = Characteristic::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let n = rng.gen_range(1..5);
        let (a, b) = (gamma_q1_at_radius(&tau, &ch, n), gamma_q1_at_radius(&tau, &ch, n + 3));
        assert!((a.value - b.value).abs() <= a.remainder_bound);
        let (a, b) = (gamma_q2_at_radius(&tau, &ch, n), gamma_q2_at_radius(&tau, &ch, n + 3));
        assert!((a.value - b.value).norm() <= a.remainder_bound);
        let (a, b) = (gamma_01_at_radius(&tau, n), gamma_01_at_radius(&tau, n + 3));
        assert!((a.value - b.value).abs() <= a.remainder_bound);
        assert!(b.remainder_bound <= a.remainder_bound);
    }
}

#[test]
fn q1_accumulation_is_real() {
    let tau = ShapeParameter::new(-0.3, 1.2).unwrap();
    let v = gamma_q1_accumulated(&tau, &Characteristic::new(0.27, 0.41), 8);
    assert!(v.im.abs() <= 1e-14);
}

#[test]
fn radius_monotone_in_im_tau() {
    let mut last = 0;
    for k in 0..20 {
        let tau = ShapeParameter::new(0.0, 1.0 + 0.25 * k as f64).unwrap();
        let n = truncation_radius_for(1e-10, &tau).unwrap();
        assert!(n >= last);
        last = n;
    }
}

#[test]
fn radius_cap_is_an_error() {
    let tau = ShapeParameter::new(0.0, 400.0).unwrap();
    assert!(matches!(truncation_radius_for(1e-15, &tau), Err(Error::Tolerance { .. })));
}

#[test]
fn q2_approximant_within_paper_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let tau = random_reduced(&mut rng, 2.0);
        let ch = Characteristic::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let full = gamma_q2(&tau, &ch, 1e-13).unwrap().value;
        assert!((gamma_q2_approx(&tau, &ch) - full).norm() <= 2.5e-3);
    }
}

#[test]
fn q1_approximant_error_is_the_dropped_diagonal() {
    // the 7-term approximant omits the (1,−1) pair, worth 2e^{−π|1+τ|²/τ₂} at a = b = 0
    let tau = ShapeParameter::square();
    let full = gamma_q1(&tau, &Characteristic::ZERO, 1e-13).unwrap().value;
    let err = full - gamma_q1_approx(&tau, &Characteristic::ZERO);
    let dropped = 2.0 * (-std::f64::consts::PI * 2.0).exp();
    assert!((err - dropped).abs() < 1e-4, "{err} {dropped}");
}

#[test]
fn sums_match_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..5 {
        let tau = random_reduced(&mut rng, 2.5);
        let ch = Characteristic::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let a = gamma_q1(&tau, &ch, 1e-12).unwrap().value;
        assert!((a - avg_abs2_abs2(&tau, &ch, 1e-10).unwrap().value).abs() < 1e-8);
        let b = gamma_q2(&tau, &ch, 1e-12).unwrap().value.norm();
        assert!((b - avg_cross(&tau, &ch, 1e-10).unwrap().value.norm()).abs() < 1e-8);
    }
}
