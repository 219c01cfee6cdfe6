use proptest::prelude::*;
use tailcomb::distributions::{t_survival, HeavyTailDistribution};
use tailcomb::Distribution;

fn all_families() -> Vec<Distribution> {
    vec![
        Distribution::cauchy(),
        Distribution::log_cauchy(),
        Distribution::levy(),
        Distribution::pareto(1.5).unwrap(),
        Distribution::frechet(0.7).unwrap(),
        Distribution::inverse_gamma(2.0).unwrap(),
        Distribution::log_gamma(1.2).unwrap(),
        Distribution::student_t(3.0).unwrap(),
        Distribution::truncated_t(1.0, 0.9).unwrap(),
    ]
}

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[test]
fn quantile_cdf_roundtrip_all_families() {
    let mut us = log_grid(1e-10, 0.5, 40);
    us.extend(log_grid(1e-6, 0.5, 40).into_iter().map(|q| 1.0 - q));
    for d in all_families() {
        for &u in &us {
            let x = d.quantile(u).unwrap();
            let back = if (x == 0.0 || x.is_infinite()) && d.has_positive_support() {
                // Quantile outside the double range: compare on the log scale.
                d.cdf_at_ln(d.ln_upper_quantile(1.0 - u).unwrap()).unwrap()
            } else {
                d.cdf(x).unwrap()
            };
            assert!(
                (back - u).abs() <= 1e-9,
                "{d}: u = {u}, x = {x}, cdf = {back}"
            );
        }
    }
}

#[test]
fn regular_variation_at_1e8() {
    for d in all_families() {
        let g = d.tail_index();
        if g == 0.0 {
            continue;
        }
        let x = 1e8;
        let ratio = d.survival(2.0 * x).unwrap() / d.survival(x).unwrap();
        assert!((ratio - 2f64.powf(-g)).abs() <= 1e-3, "{d}: {ratio}");
    }
}

#[test]
fn log_cauchy_slow_variation() {
    let d = Distribution::log_cauchy();
    let ratio = |x: f64| d.survival(2.0 * x).unwrap() / d.survival(x).unwrap();
    let r: Vec<f64> = [1e2, 1e4, 1e8].iter().map(|&x| ratio(x)).collect();
    assert!(r[0] < r[1] && r[1] < r[2] && r[2] < 1.0, "{r:?}");
    let x: f64 = 1e8;
    assert!((r[2] - x.ln() / (2.0 * x).ln()).abs() <= 1e-4);
}

#[test]
fn truncated_matches_parent_above_cut() {
    for (g, p0) in [(1.0, 0.9), (2.0, 0.5), (0.7, 0.3), (3.0, 0.05)] {
        let d = Distribution::truncated_t(g, p0).unwrap();
        let c = d.truncation_point().unwrap();
        let mass = t_survival(c, g).unwrap();
        for x in [c, c + 0.1, c + 1.0, c + 10.0, c + 1e3, 1e6] {
            let lhs = d.survival(x).unwrap() * mass;
            let rhs = t_survival(x, g).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12, "γ={g} p0={p0} x={x}");
        }
    }
}

#[test]
fn left_tail_condition() {
    for d in all_families() {
        let lower = d.support_lower_bound();
        if matches!(d.to_string().split(':').next(), Some("t" | "cauchy")) {
            for x in [0.3, 1.0, 7.0, 1e3] {
                assert_eq!(d.survival(x).unwrap(), d.cdf(-x).unwrap(), "{d} at {x}");
            }
            assert_eq!(lower, f64::NEG_INFINITY);
        } else {
            assert!(lower.is_finite(), "{d}");
            assert_eq!(d.cdf(lower - 1.0).unwrap(), 0.0);
            assert_eq!(d.cdf(-1e300).unwrap(), 0.0);
        }
    }
}

#[test]
fn survival_monotone_on_dense_grid() {
    for d in all_families() {
        let lo = d.support_lower_bound().max(-1e6);
        let start = if lo.is_finite() { lo } else { -1e6 };
        let mut prev = 1.0;
        for i in 0..10_000 {
            let x = start + (i as f64 / 9_999.0).powi(3) * 1e6;
            let s = d.survival(x).unwrap();
            assert!((0.0..=1.0).contains(&s));
            assert!(s <= prev, "{d} increases at {x}");
            prev = s;
        }
    }
}

#[test]
fn survival_plus_cdf_is_one() {
    for d in all_families() {
        for x in [-50.0, -1.0, 0.0, 0.5, 1.0, 1.5, 3.0, 40.0, 1e5] {
            let s = d.survival(x).unwrap() + d.cdf(x).unwrap();
            assert!((s - 1.0).abs() <= 1e-14, "{d} at {x}");
        }
    }
}

#[test]
fn works_in_single_precision() {
    let d = HeavyTailDistribution::<f32>::cauchy();
    assert!((d.quantile(0.75f32).unwrap() - 1.0).abs() < 1e-6);
    let t = HeavyTailDistribution::<f32>::student_t(2.0).unwrap();
    assert!((t.survival(0.0f32).unwrap() - 0.5).abs() < 1e-6);
}

proptest! {
    #[test]
    fn upper_quantile_inverts_survival(p in 1e-12f64..1.0, which in 0usize..9) {
        let d = &all_families()[which];
        let x = d.upper_quantile(p).unwrap();
        if x.is_finite() && x > d.support_lower_bound() {
            let s = d.survival(x).unwrap();
            prop_assert!((s - p).abs() <= 1e-9 * p.max(1e-3), "{} p={} s={}", d, p, s);
        }
    }

    #[test]
    fn spec_strings_roundtrip(which in 0usize..9) {
        let d = &all_families()[which];
        let parsed: Distribution = d.to_string().parse().unwrap();
        prop_assert_eq!(parsed.to_string(), d.to_string());
    }
}
