mod common;

use behavnet::measures::{
    active_ratio, gini, measure_all, pareto_ratio, speed, MeasureConfig,
};
use behavnet::netbuild::build_network;
use common::stream_strategy;
use proptest::prelude::*;

fn counts() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..1_000, 1..60)
}

fn pairwise_gini(x: &[u64]) -> f64 {
    let n = x.len() as f64;
    let total: f64 = x.iter().map(|&v| v as f64).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut diff = 0.0;
    for &a in x {
        for &b in x {
            diff += (a as f64 - b as f64).abs();
        }
    }
    diff / (2.0 * n * n * (total / n))
}

proptest! {
    #[test]
    fn gini_bounds_and_oracle(x in counts()) {
        let g = gini(&x).unwrap();
        let n = x.len() as f64;
        prop_assert!(g >= 0.0 && g <= (n - 1.0) / n + 1e-15);
        prop_assert!((g - pairwise_gini(&x)).abs() < 1e-12);
    }

    #[test]
    fn gini_scale_invariant(x in counts(), c in 1u64..50) {
        let scaled: Vec<u64> = x.iter().map(|&v| v * c).collect();
        prop_assert!((gini(&x).unwrap() - gini(&scaled).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn pareto_antitone_in_concentration(x in prop::collection::vec(1u64..200, 2..40), mass in 0.05f64..1.0) {
        let before = pareto_ratio(&x, mass).unwrap();
        let mut y = x.clone();
        let lo = (0..y.len()).min_by_key(|&i| y[i]).unwrap();
        let hi = (0..y.len()).max_by_key(|&i| y[i]).unwrap();
        if lo != hi && y[lo] > 0 {
            y[lo] -= 1;
            y[hi] += 1;
        }
        let after = pareto_ratio(&y, mass).unwrap();
        prop_assert!(after <= before, "{before} -> {after}");
        prop_assert!(before > 0.0 && before <= 1.0);
    }

    #[test]
    fn pareto_monotone_in_mass(x in prop::collection::vec(1u64..200, 1..40), a in 0.01f64..1.0, b in 0.01f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(pareto_ratio(&x, lo).unwrap() <= pareto_ratio(&x, hi).unwrap());
    }

    #[test]
    fn speed_monotone_in_window(stream in stream_strategy(6, 15), w1 in 1u64..5_000, w2 in 1u64..5_000) {
        let (lo, hi) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        let a = speed(&stream, lo).unwrap();
        let b = speed(&stream, hi).unwrap();
        prop_assert!(a <= b);
        prop_assert!((0.0..=1.0).contains(&a));
        // first edits never qualify
        let pages = stream.page_count() as f64;
        prop_assert!(b <= 1.0 - pages / stream.event_count() as f64 + 1e-12);
    }

    #[test]
    fn active_monotone_in_threshold(stream in stream_strategy(6, 15), t1 in 0u64..20, t2 in 0u64..20) {
        let net = build_network(&stream).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(active_ratio(&net, lo) >= active_ratio(&net, hi));
    }

    #[test]
    fn measure_ranges(stream in stream_strategy(8, 20)) {
        let m = measure_all(&stream, &MeasureConfig::default()).unwrap();
        for (name, v) in [
            ("self_loop_ratio", m.self_loop_ratio),
            ("multiple_link_ratio", m.multiple_link_ratio),
            ("speed", m.speed),
            ("active_ratio", m.active_ratio),
            ("anonymity_ratio", m.anonymity_ratio),
            ("pareto_ratio", m.pareto_ratio),
            ("clustering_coefficient", m.clustering_coefficient),
            ("density", m.density),
        ] {
            prop_assert!((0.0..=1.0).contains(&v), "{name} = {v}");
        }
        let n = m.editor_count as f64;
        prop_assert!(m.gini >= 0.0 && m.gini <= (n - 1.0) / n + 1e-15);
        prop_assert!(m.mean_degree >= 0.0 && m.mean_degree <= (n - 1.0).max(0.0));
        prop_assert!(m.self_loop_ratio + m.multiple_link_ratio <= 1.0 + 1e-12);
        if m.link_count > 0 {
            let net = build_network(&stream).unwrap();
            let other = (net.total_links() - net.self_loop_count()) as f64 / net.total_links() as f64;
            prop_assert!((m.self_loop_ratio + other - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn gini_boundary_cases() {
    assert_eq!(gini(&[5, 5, 5, 5]).unwrap(), 0.0);
    assert!((gini(&[0, 0, 0, 9]).unwrap() - 0.75).abs() < 1e-15);
    assert_eq!(gini(&[0, 0, 0]).unwrap(), 0.0);
    assert_eq!(gini(&[7]).unwrap(), 0.0);
}
