//! Property tests for the structural invariants: reduction round trips,
//! group laws, and the Legendre relation under random group pushes.

use num_complex::Complex;
use proptest::prelude::*;

use e6_core::eisenstein::{eval, Precision};
use e6_core::halfplane::HalfPlanePoint;
use e6_core::matrix::UnimodularMatrix;
use e6_core::modular::{in_f, in_f0, mobius_apply, reduce_to_f, reduce_to_f0, transform_eval};

fn tau_strategy() -> impl Strategy<Value = HalfPlanePoint<f64>> {
    (-3.0f64..3.0, 0.01f64..4.0).prop_map(|(re, im)| HalfPlanePoint::new(re, im).unwrap())
}

fn matrix_strategy() -> impl Strategy<Value = UnimodularMatrix> {
    // random word in the generators keeps determinant one and entries small
    proptest::collection::vec((0u8..3, -2i64..3), 1..6).prop_map(|word| {
        let mut g = UnimodularMatrix::identity();
        for (kind, n) in word {
            let step = match kind {
                0 => UnimodularMatrix::translation(n),
                1 => UnimodularMatrix::inversion(),
                _ => UnimodularMatrix::gamma1(),
            };
            if let Ok(next) = g.compose(&step) {
                let (a, b, c, d) = next.entries();
                if a.abs() <= 20 && b.abs() <= 20 && c.abs() <= 20 && d.abs() <= 20 {
                    g = next;
                }
            }
        }
        g
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_to_f_roundtrips(tau in tau_strategy()) {
        let r = reduce_to_f(tau).unwrap();
        prop_assert!(in_f(r.point.to_complex()));
        let back = mobius_apply(&r.gamma, r.point).to_complex();
        let scale = 1.0 + tau.to_complex().norm();
        prop_assert!((back - tau.to_complex()).norm() < 1e-12 * scale);
    }

    #[test]
    fn reduction_to_f0_roundtrips_in_gamma02(tau in tau_strategy()) {
        let r = reduce_to_f0(tau).unwrap();
        prop_assert!(r.gamma.is_in_gamma0_2());
        prop_assert!(in_f0(r.point.to_complex()));
        let back = mobius_apply(&r.gamma, r.point).to_complex();
        let scale = 1.0 + tau.to_complex().norm();
        prop_assert!((back - tau.to_complex()).norm() < 1e-12 * scale);
    }

    #[test]
    fn mobius_is_a_group_action(tau in tau_strategy(), g in matrix_strategy(), h in matrix_strategy()) {
        let gh = g.compose(&h).unwrap();
        let a = mobius_apply(&gh, tau).to_complex();
        let b = mobius_apply(&g, mobius_apply(&h, tau)).to_complex();
        prop_assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()));
    }

    #[test]
    fn legendre_survives_transforms(g in matrix_strategy()) {
        // pushing the bundle around the group keeps the Legendre relation
        let prec = Precision::default();
        let tau = HalfPlanePoint::new(0.3, 1.2).unwrap();
        let ev = transform_eval(&eval(tau, &prec).unwrap(), &g);
        let two_pi_i = Complex::new(0.0, 2.0 * std::f64::consts::PI);
        let defect = (ev.eta2 - (ev.tau.to_complex() * ev.eta1 - two_pi_i)).norm();
        prop_assert!(defect <= (2.0 * ev.err_bound).max(1e-9), "defect {defect:e}");
    }

    #[test]
    fn canonical_representative_is_stable(g in matrix_strategy()) {
        let (a, b, c, d) = g.entries();
        prop_assert!(c > 0 || (c == 0 && d > 0));
        let neg = UnimodularMatrix::new(-a, -b, -c, -d);
        if let Ok(neg) = neg {
            prop_assert_eq!(neg, g);
        }
    }
}
