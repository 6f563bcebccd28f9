use proptest::prelude::*;

use pathwise::follmer::{follmer_residual, rc_modification, TestFunction};
use pathwise::partition::{make_dyadic, make_rho, make_uniform, Partition};
use pathwise::qv::{estimate_limit, qv_stopped_sum, Tolerance};
use pathwise::sum::CompensatedSum;
use pathwise::zigzag_lab::{
    bucket_counts, count_formula, count_result, empirical_l, l_alpha_oracle, l_alpha_series,
    ORACLE_BOUND,
};
use pathwise::{make_random_walk, CadlagPath, Side, Time};

/// Dyadic shifts `a/1024 ∈ [0,1)`, for which the floor terms are decided exactly.
fn shift() -> impl Strategy<Value = f64> {
    (0u32..1024).prop_map(|a| a as f64 / 1024.0)
}

fn near_time() -> impl Strategy<Value = Time> {
    (any::<bool>(), 0u32..400, 0.2500001f64..=1.0).prop_map(|(after, hump, dist)| {
        let side = if after { Side::After } else { Side::Before };
        Time::near(side, hump, dist)
    })
}

fn any_time() -> impl Strategy<Value = Time> {
    prop_oneof![(0.0f64..2.0).prop_map(Time::Abs), near_time()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_equals_weighted_buckets(n in 1u64..200_000, alpha in shift()) {
        let buckets = bucket_counts(n, alpha).unwrap();
        let weighted: u64 = buckets.iter().map(|&(l, c)| l * c).sum();
        prop_assert_eq!(count_formula(n, alpha).unwrap(), 2 * weighted);
        let root = (n as f64).sqrt().floor() as u64;
        prop_assert_eq!(buckets.len() as u64, root);
        prop_assert!(buckets.iter().enumerate().all(|(i, b)| b.0 == i as u64 + 1));
    }

    #[test]
    fn geometric_offset_is_constant(n in 1u64..3_000, a in 0u32..4) {
        let alpha = a as f64 / 4.0;
        let r = count_result(n, alpha, true).unwrap();
        let expected = if alpha == 0.0 { 1 } else { 2 };
        prop_assert_eq!(r.boundary_offset, Some(expected));
        prop_assert_eq!(r.unit_steps, Some(true));
    }

    #[test]
    fn lebesgue_increment_law(n in 1u64..5_000, alpha in shift()) {
        let z = CadlagPath::zigzag(pathwise::path::Zigzag::z());
        let rho = make_rho(n, alpha).unwrap();
        let qv = qv_stopped_sum(&z, &rho, 1.0).unwrap();
        let unit = rho.interval_count() as f64 / n as f64;
        prop_assert!((qv - unit).abs() <= 2.0 / n as f64, "qv={} unit={}", qv, unit);
    }

    #[test]
    fn reflection_reverses_order(a in any_time(), b in any_time()) {
        prop_assert_eq!(a.cmp(&b), b.reflect().cmp(&a.reflect()));
    }

    #[test]
    fn order_agrees_with_f64_when_resolvable(a in any_time(), b in any_time()) {
        let (x, y) = (a.to_f64(), b.to_f64());
        if x < y {
            prop_assert!(a < b);
        } else if x > y {
            prop_assert!(a > b);
        }
    }

    #[test]
    fn bracket_contains_point(mut pts in prop::collection::vec(0.001f64..0.999, 1..20), s in 0.0001f64..=1.0) {
        pts.push(0.0);
        pts.push(1.0);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let p = Partition::from_f64(&pts).unwrap();
        let (u, v) = p.bracket(s).unwrap();
        prop_assert!(u < Time::Abs(s) && Time::Abs(s) <= v);
    }

    #[test]
    fn rc_modification_reproduces_samples(incs in prop::collection::vec(0.0f64..1.0, 1..40)) {
        let k = incs.len();
        let mut level = 0.0;
        let samples: Vec<(Time, f64)> = incs
            .iter()
            .enumerate()
            .map(|(i, d)| {
                level += d;
                (Time::Abs(i as f64 / k as f64), level)
            })
            .collect();
        let f = rc_modification(&samples, 0.0).unwrap();
        for &(t, v) in &samples {
            prop_assert!((f.eval(t) - v).abs() <= 1e-12);
        }
        let w = f.jumps();
        prop_assert!(w.iter().all(|j| j.1 > 0.0));
    }

    #[test]
    fn affine_residual_vanishes(seed in 0u64..1000, k in 3u32..10, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let walk = make_random_walk(1 << k, 1.0, seed).unwrap();
        let p = make_uniform(1.0, 37).unwrap();
        let r = follmer_residual(&walk, &p, &TestFunction::affine(a, b), 0.05).unwrap();
        prop_assert!(r.abs() <= 1e-12);
    }

    #[test]
    fn square_residual_vanishes_on_aligned_partitions(seed in 0u64..1000, k in 3u32..12, extra in 0u32..3) {
        let walk = make_random_walk(1 << k, 1.0, seed).unwrap();
        let p = make_dyadic(1.0, k + extra).unwrap();
        let h = (1.0 / (1u64 << k) as f64).sqrt();
        for eps in [h / 2.0, 2.0 * h] {
            let r = follmer_residual(&walk, &p, &TestFunction::square(), eps).unwrap();
            prop_assert!(r.abs() <= 1e-9);
        }
    }

    #[test]
    fn constant_sequence_converges(c in -100.0f64..100.0, len in 4usize..12) {
        let values: Vec<(u64, f64)> = (1..=len as u64).map(|n| (n, c)).collect();
        let d = estimate_limit(&values, Tolerance::default()).unwrap();
        prop_assert_eq!(d.estimate, Some(c));
        prop_assert!(!d.split_detected);
    }

    #[test]
    fn compensated_sum_is_order_independent(mut v in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let forward = v.iter().copied().collect::<CompensatedSum>().value();
        v.reverse();
        let backward = v.iter().copied().collect::<CompensatedSum>().value();
        let scale: f64 = v.iter().map(|x| x.abs()).sum();
        prop_assert!((forward - backward).abs() <= 4.0 * f64::EPSILON * scale.max(1.0));
    }
}

#[test]
fn series_and_oracle_agree_on_grid() {
    for i in 0..20 {
        let alpha = i as f64 * 0.05;
        for terms in [10, 1000, 100_000] {
            let r = l_alpha_series(alpha, terms).unwrap();
            assert!(
                (r.series_value - r.oracle_value).abs() <= r.tail_bound + ORACLE_BOUND,
                "alpha={alpha} terms={terms}"
            );
        }
    }
}

#[test]
fn telescoped_partial_sums_match_direct_sums() {
    // 2Σ_{l≤K}[l/(l+α)² − l/(l+1+α)²] = 2Σ_{l≤K}(l+α)^{−2} − 2K/(K+1+α)²
    for alpha in [0.0, 0.3, 0.5, 0.9] {
        for k in [1usize, 5, 50, 500] {
            let telescoped = pathwise::zigzag_lab::l_alpha_partial(alpha, k);
            let direct: f64 = (1..=k)
                .map(|l| 2.0 / ((l as f64 + alpha) * (l as f64 + alpha)))
                .sum::<f64>()
                - 2.0 * k as f64 / ((k as f64 + 1.0 + alpha) * (k as f64 + 1.0 + alpha));
            assert!((telescoped - direct).abs() < 1e-13, "alpha={alpha} k={k}");
        }
    }
}

#[test]
fn oracle_strictly_decreasing() {
    let v: Vec<f64> = (0..=20)
        .map(|i| l_alpha_oracle(i as f64 * 0.05).unwrap())
        .collect();
    assert!(v.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn empirical_gap_shrinks() {
    for alpha in [0.0, 0.25, 0.5, 0.75] {
        let l = l_alpha_oracle(alpha).unwrap();
        let gap = |n: u64| (empirical_l(n, alpha).unwrap() - l).abs();
        assert!(gap(1_000_000) < gap(10_000), "alpha={alpha}");
    }
}
