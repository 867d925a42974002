//! Property tests tying the modules together across random inputs.

use cusplab::model::SchottkyModel;
use cusplab::profiles::{CuspMetric, UProfile};
use cusplab::series::{parabolic_series, Verdict};
use cusplab::words::{Letter, Word};
use proptest::prelude::*;

fn arb_profile() -> impl Strategy<Value = UProfile<f64>> {
    prop_oneof![
        Just(UProfile::pure_log()),
        (1.05f64..3.0).prop_map(|alpha| UProfile::lemma22(alpha, 0.125, 0.9)),
        Just(UProfile::remark24()),
    ]
}

fn arb_word(max_syllables: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((prop::bool::ANY, -9i64..=9), 1..max_syllables).prop_map(|v| {
        Word::from_syllables(
            v.into_iter()
                .map(|(is_p, e)| (if is_p { Letter::P } else { Letter::H }, e)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The metric coefficient at the horospherical height always rescales the
    /// separation back to unit size.
    #[test]
    fn height_inverts_the_metric_coefficient(
        profile in arb_profile(),
        a in 0.0f64..6.0,
        log_d in -3.0f64..60.0,
    ) {
        let metric = CuspMetric::new(a, profile);
        let d = log_d.exp();
        let t = metric.height(d).unwrap();
        let prod = metric.t_profile(t).unwrap() * d;
        prop_assert!((prod - 1.0).abs() <= 1e-12, "T(h(D)) D = {prod}");
    }

    /// Deepening the constant-curvature stripe never lengthens an orbit.
    #[test]
    fn orbit_distances_monotone_in_stripe_depth(
        word in arb_word(7),
        a in 0.0f64..4.0,
        da in 0.01f64..4.0,
    ) {
        let profile = UProfile::lemma22(1.5, 0.125, 0.9);
        let shallow = SchottkyModel::new(2.0, 2.0, 0.0, CuspMetric::new(a, profile));
        let deep = shallow.at_a(a + da);
        let ds = shallow.orbit_distance(&word).unwrap();
        let dd = deep.orbit_distance(&word).unwrap();
        prop_assert!(ds >= dd - 1e-12);
        // and inversion symmetry holds at every depth
        let dsi = shallow.orbit_distance(&word.inverse()).unwrap();
        prop_assert!((ds - dsi).abs() <= 1e-12);
    }

    /// A series that converges at some exponent converges at any larger one.
    #[test]
    fn verdict_monotone_in_exponent(
        alpha in 0.0f64..2.5,
        s1 in 0.35f64..1.0,
        ds in 0.01f64..0.5,
    ) {
        let metric = CuspMetric::new(0.0, UProfile::lemma22(alpha, 0.125, 0.9));
        let v1 = parabolic_series(&metric, 1, s1, 3_000).unwrap().verdict;
        let v2 = parabolic_series(&metric, 1, s1 + ds, 3_000).unwrap().verdict;
        prop_assert_ne!(v1, Verdict::Undecided);
        prop_assert_ne!(v2, Verdict::Undecided);
        if v1 == Verdict::Converges {
            prop_assert_eq!(v2, Verdict::Converges);
        }
    }

    /// Tail intervals are honest: a tenfold refinement stays inside them.
    #[test]
    fn refinement_stays_inside_tail_interval(
        alpha in 1.1f64..2.5,
        s in 0.5f64..0.9,
    ) {
        let metric = CuspMetric::new(0.5, UProfile::lemma22(alpha, 0.125, 0.9));
        let coarse = parabolic_series(&metric, 1, s, 2_000).unwrap();
        let fine = parabolic_series(&metric, 1, s, 20_000).unwrap();
        prop_assert!(fine.total_estimate() >= coarse.total_lower() - 1e-12);
        prop_assert!(fine.total_estimate() <= coarse.total_upper() + 1e-12);
    }
}
