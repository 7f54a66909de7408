// Copyright 2026 rsdual Contributors
// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rsdual::double::HamiltonianSelector;
use rsdual::duality::{duality_forward, duality_inverse, point_distance};
use rsdual::flows::flow;
use rsdual::linalg::{iwasawa_left, iwasawa_right, pairing_im_trace, unitary_deviation};
use rsdual::points::Coupling;
use rsdual::reduction::{constraint_residual, itilde, reduce_to_slice};
use rsdual::rs_model::canonicalize;
use rsdual::verify::sampling::{random_double_point, random_point_p};
use rsdual::{CMat, ToleranceConfig, C64};

fn matrix(n: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
        CMat::from_iterator(n, n, v.into_iter().map(|(re, im)| C64::new(re, im)))
    })
}

fn coupling() -> impl Strategy<Value = Coupling> {
    (0.1f64..3.0, any::<bool>()).prop_map(|(m, s)| Coupling::new(if s { m } else { -m }).unwrap())
}

fn is_upper_positive(b: &CMat) -> bool {
    let n = b.nrows();
    (0..n).all(|i| {
        b[(i, i)].im == 0.0 && b[(i, i)].re > 0.0 && (0..i).all(|j| b[(i, j)].norm() == 0.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iwasawa_factors_reconstruct((n, k) in (1usize..6).prop_flat_map(|n| (Just(n), matrix(n)))) {
        let tol = ToleranceConfig::default();
        prop_assume!(k.determinant().norm() > 1e-6);
        let (b, u) = iwasawa_left(&k, &tol).unwrap();
        prop_assert!(is_upper_positive(b.matrix()));
        prop_assert!(unitary_deviation(u.matrix()) < 1e-12 * n as f64);
        prop_assert!((b.matrix() * u.matrix().adjoint() - &k).norm() < 1e-11 * k.norm());
        let (v, c) = iwasawa_right(&k, &tol).unwrap();
        prop_assert!(is_upper_positive(c.matrix()));
        let c_inv = c.matrix().clone().try_inverse().unwrap();
        prop_assert!((v.matrix() * c_inv - &k).norm() < 1e-11 * k.norm());
    }

    #[test]
    fn pairing_is_bilinear_and_symmetric(a in matrix(3), b in matrix(3), c in matrix(3), s in -2.0f64..2.0) {
        let lhs = pairing_im_trace(&(&a * C64::new(s, 0.0) + &b), &c);
        let rhs = s * pairing_im_trace(&a, &c) + pairing_im_trace(&b, &c);
        prop_assert!((lhs - rhs).abs() < 1e-12);
        prop_assert!((pairing_im_trace(&a, &b) - pairing_im_trace(&b, &a)).abs() < 1e-12);
    }

    #[test]
    fn slice_embedding_lands_on_the_constraint_surface(seed in any::<u64>(), n in 1usize..7, x in coupling()) {
        let tol = ToleranceConfig::default();
        let pt = random_point_p(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let k = itilde(&pt, x, &tol).unwrap();
        prop_assert!(constraint_residual(&k, x, &tol).unwrap() <= tol.constraint);
        let (back, _) = reduce_to_slice(&k, x, &tol).unwrap();
        prop_assert!(point_distance(&back, &canonicalize(&pt).0) < 1e-10);
    }

    #[test]
    fn duality_round_trips(seed in any::<u64>(), n in 1usize..5, x in coupling()) {
        let tol = ToleranceConfig::default();
        let pt = canonicalize(&random_point_p(n, &mut ChaCha8Rng::seed_from_u64(seed))).0;
        let dual = duality_forward(&pt, x, &tol).unwrap().target;
        let back = duality_inverse(&dual, x, &tol).unwrap().target;
        prop_assert!(point_distance(&back, &pt) <= tol.duality);
    }

    #[test]
    fn flows_compose(seed in any::<u64>(), n in 1usize..5, t in -1.0f64..1.0, s in -1.0f64..1.0) {
        let tol = ToleranceConfig::default();
        let k = random_double_point(n, &mut ChaCha8Rng::seed_from_u64(seed));
        for sel in [HamiltonianSelector::F(2), HamiltonianSelector::Phi(-1)] {
            let two = flow(&flow(&k, &sel, t, &tol).unwrap(), &sel, s, &tol).unwrap();
            let one = flow(&k, &sel, t + s, &tol).unwrap();
            prop_assert!((two - &one).norm() < 1e-9 * one.norm());
        }
    }
}
