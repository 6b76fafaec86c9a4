use std::f64::consts::PI;

use fstring_core::gauge::GaugeFunction;
use fstring_core::geometry::{
    boundary_count, minkowski_estimate, s_estimate, tube_volume, ScaleGrid,
};
use fstring_core::spectral::{eigen_count, packing_defect, remainder_identity_check, weyl_term};
use fstring_core::strings::FractalString;
use proptest::prelude::*;

fn strings() -> impl Strategy<Value = FractalString> {
    prop_oneof![
        (0.3f64..3.0).prop_map(|a| FractalString::a_string(a).unwrap()),
        Just(FractalString::cantor()),
        prop::collection::vec(1e-4f64..1.0, 1..40)
            .prop_map(|v| FractalString::explicit(v).unwrap()),
        prop::collection::vec((1e-4f64..1.0, 1u64..50), 1..8).prop_map(|mut b| {
            b.sort_by(|x, y| y.0.total_cmp(&x.0));
            b.dedup_by(|x, y| x.0 == y.0);
            FractalString::run_length(b).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counting_is_monotone(s in strings(), e in 1e-6f64..0.5, r in 1.0f64..10.0) {
        prop_assert!(s.count_exceeding(e * r).unwrap() <= s.count_exceeding(e).unwrap());
    }

    #[test]
    fn counting_matches_lengths(s in strings(), e in 1e-5f64..0.5) {
        let j = s.count_exceeding(e).unwrap();
        if j > 0 {
            prop_assert!(s.length(j).unwrap() > e);
        }
        if s.len().is_none_or(|n| j < n) {
            prop_assert!(s.length(j + 1).unwrap() <= e);
        }
    }

    #[test]
    fn mass_is_conserved(s in strings(), n in 0u64..500) {
        let n = s.len().map_or(n, |len| n.min(len));
        let total = s.head_sum(n).unwrap() + s.tail_after(n).unwrap();
        prop_assert!((total - s.total_length()).abs() <= 1e-12 * s.total_length());
    }

    #[test]
    fn tube_volume_is_monotone_and_bounded(s in strings(), e in 1e-6f64..0.5, r in 1.0f64..4.0) {
        let v = tube_volume(&s, e).unwrap();
        let w = tube_volume(&s, e * r).unwrap();
        prop_assert!(v <= w + 1e-15);
        prop_assert!(w <= s.total_length() * (1.0 + 1e-12));
        // V(ε) ≤ 2ε·J(2ε) + tail ≤ |Ω| and V grows at rate at most 2J(2ε)
        let count = boundary_count(&s, e).unwrap() as f64;
        prop_assert!(w - v <= count * (r - 1.0) * e + 1e-12);
    }

    #[test]
    fn spectral_counting_invariants(s in strings(), l in 1.0f64..1e9, r in 1.0f64..3.0) {
        let n1 = eigen_count(&s, l).unwrap();
        let n2 = eigen_count(&s, l * r).unwrap();
        prop_assert!(n1 <= n2);
        prop_assert!(n1 as f64 <= weyl_term(&s, l) * (1.0 + 1e-12));
        let res = remainder_identity_check(&s, &[l]).unwrap();
        prop_assert!(res.max_scaled <= 1e-9);
        let x = l.sqrt() / PI;
        let delta = packing_defect(&s, x).unwrap();
        let lower = x * s.tail_sum_beyond(1.0 / x).unwrap();
        let upper = lower + s.count_exceeding(1.0 / x).unwrap() as f64;
        prop_assert!(lower - 1e-9 * x <= delta && delta <= upper + 1e-9 * x);
    }

    #[test]
    fn content_estimates_are_ordered(a in 0.3f64..3.0) {
        let s = FractalString::a_string(a).unwrap();
        let d = 1.0 / (a + 1.0);
        let h = GaugeFunction::power(1.0 - d, 1.0).unwrap();
        let grid = ScaleGrid::geometric(1e-3, 0.5, 20).unwrap();
        let m = minkowski_estimate(&s, &h, &grid, 0.02).unwrap();
        let sc = s_estimate(&s, &h, &grid, 0.02).unwrap();
        prop_assert!(0.0 <= m.lower && m.lower <= m.upper);
        prop_assert!(0.0 <= sc.lower && sc.lower <= sc.upper);
        // M = S = 2^{1-D} a^D/(1-D) for l_j ~ a j^{-1/D}
        let target = 2f64.powf(1.0 - d) * a.powf(d) / (1.0 - d);
        prop_assert!((m.value() / target - 1.0).abs() < 0.05, "{} vs {}", m.value(), target);
        prop_assert!((m.value() / sc.value() - 1.0).abs() < 0.05);
    }
}
