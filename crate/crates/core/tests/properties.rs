use proptest::prelude::*;
use qtt_core::qlinalg::shrink_q_scalar;
use qtt_core::random::{random_qmatrix, random_qtensor, random_unitary};
use qtt_core::{
    qka_forward, qka_inverse, qsvd, QMatrix, QkaPlan, Quaternion, QuaternionArray, TransformKind,
    TransformSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from_array)
}

fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #[test]
    fn hamilton_product_is_associative(p in quaternion(), q in quaternion(), r in quaternion()) {
        prop_assert!(close((p * q) * r, p * (q * r), 1e-12));
    }

    #[test]
    fn modulus_is_multiplicative(p in quaternion(), q in quaternion()) {
        let lhs = (p * q).norm();
        prop_assert!((lhs - p.norm() * q.norm()).abs() <= 1e-12 * (1.0 + lhs));
    }

    #[test]
    fn conjugate_reverses_products(p in quaternion(), q in quaternion()) {
        prop_assert!(close((p * q).conj(), q.conj() * p.conj(), 1e-12));
    }

    #[test]
    fn soft_threshold_composes(x in quaternion(), a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let twice = shrink_q_scalar(shrink_q_scalar(x, a), b);
        prop_assert!(close(twice, shrink_q_scalar(x, a + b), 1e-12));
        let once = shrink_q_scalar(x, a);
        prop_assert!((once.norm() - (x.norm() - a).max(0.0)).abs() <= 1e-12 * (1.0 + x.norm()));
        if once.norm() > 0.0 {
            prop_assert!(close(once.signq(), x.signq(), 1e-12));
        }
    }

    #[test]
    fn nuclear_norm_is_unitarily_invariant(seed in any::<u64>(), m in 1usize..7, n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_qmatrix(&mut rng, m, n);
        let u = random_unitary(&mut rng, m);
        let v = random_unitary(&mut rng, n);
        let b = u.matmul(&a).unwrap().matmul(&v).unwrap();
        let (na, nb) = (qsvd(&a).unwrap().nuclear_norm(), qsvd(&b).unwrap().nuclear_norm());
        prop_assert!((na - nb).abs() <= 1e-10 * (1.0 + na));
    }

    #[test]
    fn qka_is_a_bijection(seed in any::<u64>(), base in 2usize..4, order in 1usize..4) {
        let side = base.pow(order as u32);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_qmatrix(&mut rng, side, side);
        let plan = QkaPlan::image(side, base, None).unwrap();
        let t = qka_forward(&g, &plan).unwrap();
        prop_assert_eq!(t.dims().to_vec(), vec![base * base; order]);
        prop_assert_eq!(qka_inverse(&t, &plan).unwrap(), g);
    }

    #[test]
    fn transforms_invert_and_preserve_energy(seed in any::<u64>(), kind in prop::sample::select(vec![
        TransformKind::Dct, TransformKind::Wht, TransformKind::Dft, TransformKind::Identity,
    ])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = [4, 2, 8];
        let x = random_qtensor(&mut rng, &dims);
        let spec = TransformSpec::uniform(&dims, kind, qtt_core::default_mu()).unwrap();
        let y = spec.apply(&x).unwrap();
        prop_assert!((y.fro_norm() - x.fro_norm()).abs() <= 1e-12 * x.fro_norm());
        let back = spec.inverse(&y).unwrap();
        prop_assert!(back.sub(&x).unwrap().fro_norm() <= 1e-12 * x.fro_norm());
    }
}

#[test]
fn identity_matrix_has_unit_spectrum() {
    let s = qsvd(&QMatrix::identity(5)).unwrap();
    assert!(s.sigma.iter().all(|&v| (v - 1.0).abs() < 1e-14));
}
