use abrikosov::lattice_geometry::reduce_to_fundamental_domain;
use abrikosov::stability_functions::{gamma_k_direct, symmetry_residuals};
use abrikosov::{Characteristic, Mobius, ShapeParameter};
use proptest::prelude::*;

fn tau_any() -> impl Strategy<Value = ShapeParameter> {
    (-3.0..3.0f64, 0.2..3.0f64).prop_map(|(re, im)| ShapeParameter::new(re, im).unwrap())
}

fn tau_reduced() -> impl Strategy<Value = ShapeParameter> {
    (-0.5..0.5f64, 0.0..1.0f64).prop_map(|(re, u)| {
        let lo = (1.0 - re * re).sqrt();
        ShapeParameter::new(re, lo + u * (3.0 - lo)).unwrap()
    })
}

fn characteristic() -> impl Strategy<Value = Characteristic> {
    (-0.5..0.5f64, -0.5..0.5f64).prop_map(|(a, b)| Characteristic::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reduction_lands_in_domain(tau in tau_any()) {
        let (t, g) = reduce_to_fundamental_domain(&tau).unwrap();
        prop_assert!(t.is_reduced());
        prop_assert_eq!(g.det(), 1);
        let img = g.apply(tau.as_complex());
        prop_assert!((img - t.as_complex()).norm() < 1e-9);
    }

    #[test]
    fn reduction_is_idempotent(tau in tau_any()) {
        let (t, _) = reduce_to_fundamental_domain(&tau).unwrap();
        let (t2, g2) = reduce_to_fundamental_domain(&t).unwrap();
        prop_assert!((t2.as_complex() - t.as_complex()).norm() < 1e-12);
        prop_assert_eq!(g2, Mobius::IDENTITY);
    }

    #[test]
    fn symmetry_identities(tau in tau_reduced(), ch in characteristic()) {
        for (name, r) in symmetry_residuals(&tau, &ch, 1e-11).unwrap() {
            prop_assert!(r.passes(), "{} {:?}", name, r);
        }
    }

    #[test]
    fn gamma_k_covariant_under_reduction(tau in tau_any(), ch in characteristic()) {
        let (t, g) = reduce_to_fundamental_domain(&tau).unwrap();
        let a = gamma_k_direct(&tau, &ch, 1e-10);
        prop_assume!(a.is_ok());
        let a = a.unwrap().gamma_k;
        let b = gamma_k_direct(&t, &ch.transport(&g), 1e-10).unwrap().gamma_k;
        prop_assert!((a.value - b.value).abs() <= a.remainder_bound + b.remainder_bound);
    }
}
