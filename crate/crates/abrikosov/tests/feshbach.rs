use abrikosov::fiber_spectrum::{feshbach_map, FeshbachSplit};
use abrikosov::{Error, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let a = DMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

fn random_projection(rng: &mut ChaCha8Rng, n: usize, r: usize) -> DMatrix<C64> {
    let a = DMatrix::from_fn(n, r, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let q = a.qr().q();
    &q * q.adjoint()
}

#[test]
fn block_diagonal_gives_top_block() {
    let mut h = DMatrix::<C64>::zeros(5, 5);
    for i in 0..5 {
        h[(i, i)] = C64::new(i as f64 + 1.0, 0.0);
    }
    h[(0, 1)] = C64::new(0.3, 0.1);
    h[(1, 0)] = C64::new(0.3, -0.1);
    let mut p = DMatrix::<C64>::zeros(5, 5);
    p[(0, 0)] = C64::new(1.0, 0.0);
    p[(1, 1)] = C64::new(1.0, 0.0);
    let f = feshbach_map(&h, &p, -0.7).unwrap();
    let s = FeshbachSplit::new(&h, &p).unwrap();
    let top = s.up.adjoint() * &h * &s.up;
    assert!((f - top).norm() < 1e-13);
}

#[test]
fn isospectral_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.gen_range(3..=12);
        let r = rng.gen_range(1..n);
        let h = random_hermitian(&mut rng, n);
        let p = random_projection(&mut rng, n, r);
        let split = FeshbachSplit::new(&h, &p).unwrap();
        let gap = split.complement_gap();
        let mut dense: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().cloned().filter(|v| *v < gap).collect();
        dense.sort_by(f64::total_cmp);
        let got = split.eigenvalues_below_gap(1e-12).unwrap();
        assert_eq!(got.len(), dense.len());
        for (a, b) in got.iter().zip(&dense) {
            assert!((a - b).abs() < 1e-9, "{a} {b}");
            let f = split.map(*b).unwrap() - DMatrix::identity(r, r) * C64::new(*b, 0.0);
            let sv = f.singular_values();
            assert!(sv.min() < 1e-8);
        }
    }
}

#[test]
fn lift_maps_kernel_to_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = random_hermitian(&mut rng, 8);
    let p = random_projection(&mut rng, 8, 3);
    let split = FeshbachSplit::new(&h, &p).unwrap();
    let lam = split.eigenvalues_below_gap(1e-13).unwrap()[0];
    let f = split.map(lam).unwrap() - DMatrix::identity(3, 3) * C64::new(lam, 0.0);
    let svd = f.svd(true, true);
    let (imin, _) = svd.singular_values.argmin();
    let v = svd.v_t.unwrap().row(imin).adjoint();
    let psi = split.lift(lam).unwrap() * v;
    let res = &h * &psi - &psi * C64::new(lam, 0.0);
    assert!(res.norm() < 1e-8 * psi.norm(), "{}", res.norm());
}

#[test]
fn singular_complement_is_reported() {
    let mut h = DMatrix::<C64>::zeros(3, 3);
    h[(2, 2)] = C64::new(2.0, 0.0);
    let mut p = DMatrix::<C64>::zeros(3, 3);
    p[(0, 0)] = C64::new(1.0, 0.0);
    assert!(matches!(feshbach_map(&h, &p, 2.0), Err(Error::Invertibility { .. })));
}
