use dnstrip::scenario::{preset, Scenario};
use dnstrip::transverse::{sufficient_condition_rhs, robin_lambda0};
use dnstrip::variational::envelope::{tail, tail_cutoff, tail_derivative};
use dnstrip::geometry::ProfileSpec;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn robin_eigenvalue_grows_with_alpha(d in 0.2f64..3.0, a in -0.4f64..8.0, da in 0.0f64..4.0) {
        let lo = robin_lambda0(d, a / d).unwrap().lambda0;
        let hi = robin_lambda0(d, (a + da) / d).unwrap().lambda0;
        prop_assert!(hi >= lo - 1e-9);
    }

    #[test]
    fn sufficient_condition_rhs_is_increasing(x in 0.0f64..0.79, dx in 1e-6f64..0.01) {
        prop_assert!(sufficient_condition_rhs(x + dx) > sufficient_condition_rhs(x));
    }

    #[test]
    fn tail_is_a_smooth_cutoff(w in 0.2f64..5.0, t in 0.0f64..1.0) {
        let s = t * tail_cutoff(w);
        let v = tail(s, w);
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!(tail_derivative(s, w) <= 0.0);
        let h = 1e-6 * w;
        if s > h {
            let fd = (tail(s + h, w) - tail(s - h, w)) / (2.0 * h);
            prop_assert!((fd - tail_derivative(s, w)).abs() < 1e-6 / w);
        }
    }

    #[test]
    fn scenarios_round_trip_through_json(d in 0.1f64..3.0, c in -0.5f64..0.5, s0 in 0.5f64..4.0) {
        let mut sc = preset("prop1_bend").unwrap();
        sc.geometry.d = d;
        sc.geometry.profile = ProfileSpec::PolyBump { c, s0 };
        let back = Scenario::from_json(&sc.to_json()).unwrap();
        prop_assert_eq!(back, sc);
    }
}
