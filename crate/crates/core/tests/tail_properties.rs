use proptest::prelude::*;
use screen_limits::tailcore::{
    binomial_tail, chernoff_upper, lecam_bound, overlap_probability, poisson_log_tail, poisson_tail,
    rate_function, robbins_lower, tail_estimate, threshold_for_ratio, OverlapInput,
};
use statrs::function::gamma::gamma_lr;

const LAMBDAS: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 10.0, 50.0];
const RATIOS: [f64; 4] = [1.2, 1.5, 2.0, 3.0];

#[test]
fn sandwich_on_grid_at_realized_ratio() {
    for &lambda in &LAMBDAS {
        for &c in &RATIOS {
            let m = threshold_for_ratio(lambda, c).unwrap();
            let c_real = m as f64 / lambda;
            let exact = poisson_tail(lambda, m).unwrap();
            let upper = chernoff_upper(lambda, m as f64).unwrap();
            let lower = robbins_lower(lambda, c_real).unwrap();
            assert!(lower <= exact && exact <= upper, "lambda={lambda} c={c}: {lower} {exact} {upper}");
            let est = tail_estimate(lambda, m).unwrap();
            assert!(est.robbins_lower <= est.exact && est.exact <= est.chernoff_upper);
        }
    }
}

#[test]
fn chernoff_holds_at_nominal_ratio_too() {
    for &lambda in &LAMBDAS {
        for &c in &RATIOS {
            let m = threshold_for_ratio(lambda, c).unwrap();
            assert!(poisson_tail(lambda, m).unwrap() <= chernoff_upper(lambda, c * lambda).unwrap());
        }
    }
}

#[test]
fn matches_regularized_incomplete_gamma() {
    // Pr(Pois(lambda) >= m) = P(m, lambda)
    for &lambda in &[0.3, 1.0, 4.5, 20.0, 150.0] {
        for m in [1u64, 2, 5, 10, 30, 100] {
            let ours = poisson_tail(lambda, m).unwrap();
            let oracle = gamma_lr(m as f64, lambda);
            if oracle > 1e-200 {
                assert!((ours - oracle).abs() <= 1e-10 * oracle.max(1e-300) + 1e-15, "{lambda} {m}: {ours} {oracle}");
            }
        }
    }
}

fn enumerate_tail(k: u32, p: f64, m: u32) -> f64 {
    let (mut total, mut carry) = (0.0f64, 0.0f64);
    for outcome in 0u64..(1 << k) {
        let ones = outcome.count_ones();
        if ones >= m {
            let term = p.powi(ones as i32) * (1.0 - p).powi((k - ones) as i32);
            let t = total + term;
            carry += if total.abs() >= term.abs() { (total - t) + term } else { (term - t) + total };
            total = t;
        }
    }
    total + carry
}

#[test]
fn binomial_matches_enumeration_small() {
    for k in 1..=16u32 {
        for &p in &[0.01, 0.1, 0.37, 0.5, 0.9] {
            for m in 0..=k + 1 {
                let ours = binomial_tail(k as u64, p, m as u64).unwrap();
                let brute = enumerate_tail(k, p, m);
                assert!((ours - brute).abs() < 1e-12, "k={k} p={p} m={m}: {ours} {brute}");
            }
        }
    }
}

#[test]
fn binomial_matches_enumeration_k30() {
    // 2^30 outcomes grouped by popcount: identical sum in a tractable form
    let k = 30u32;
    for &p in &[0.02f64, 0.2, 0.6] {
        for m in [0u32, 1, 3, 10, 25, 30] {
            let brute: f64 = (m..=k)
                .map(|j| {
                    let ways = (0..j).fold(1u128, |acc, i| acc * (k - i) as u128 / (i + 1) as u128);
                    ways as f64 * p.powi(j as i32) * (1.0 - p).powi((k - j) as i32)
                })
                .sum();
            let ours = binomial_tail(k as u64, p, m as u64).unwrap();
            assert!((ours - brute).abs() < 1e-12, "p={p} m={m}");
        }
    }
}

fn choose(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[test]
fn overlap_matches_exact_binomials() {
    for v in 1..=60u64 {
        for t in 0..=v {
            for s in 0..=v {
                let exact = 1.0 - choose(v - t, s) as f64 / choose(v, s) as f64;
                let ours = overlap_probability(OverlapInput::new(v, t, s).unwrap());
                assert!((ours - exact).abs() < 1e-12, "V={v} t={t} s={s}: {ours} {exact}");
            }
        }
    }
}

#[test]
fn rate_function_derivative_is_log() {
    let h = 1e-6;
    for &c in &[0.2, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0, 10.0] {
        let d = (rate_function(c + h).unwrap() - rate_function(c - h).unwrap()) / (2.0 * h);
        assert!((d - f64::ln(c)).abs() < 1e-6, "c={c}: {d}");
    }
    assert_eq!(rate_function(1.0).unwrap(), 0.0);
}

proptest! {
    #[test]
    fn tail_monotone_in_m(lambda in 0.01f64..500.0, m in 0u64..800) {
        let a = poisson_log_tail(lambda, m).unwrap();
        let b = poisson_log_tail(lambda, m + 1).unwrap();
        prop_assert!(b <= a + 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn tail_monotone_in_lambda(lambda in 0.01f64..500.0, bump in 1.0001f64..2.0, m in 1u64..800) {
        let a = poisson_log_tail(lambda, m).unwrap();
        let b = poisson_log_tail(lambda * bump, m).unwrap();
        prop_assert!(b >= a - 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn tail_is_a_probability(lambda in 1e-3f64..1e4, m in 0u64..20_000) {
        let q = poisson_tail(lambda, m).unwrap();
        prop_assert!((0.0..=1.0).contains(&q));
        prop_assert!(poisson_log_tail(lambda, m).unwrap() <= 0.0);
    }

    #[test]
    fn sandwich_random(lambda in 1.0f64..1000.0, c in 1.01f64..5.0) {
        let m = threshold_for_ratio(lambda, c).unwrap();
        let est = tail_estimate(lambda, m).unwrap();
        let ln_lower = est.robbins_lower.ln();
        prop_assert!(ln_lower <= est.log_exact + 1e-12);
        prop_assert!(est.log_exact <= -est.exponent + 1e-12);
    }

    #[test]
    fn rate_function_convex(c in 0.01f64..20.0, d in 0.01f64..20.0, w in 0.0f64..1.0) {
        let mid = w * c + (1.0 - w) * d;
        let lhs = rate_function(mid).unwrap();
        let rhs = w * rate_function(c).unwrap() + (1.0 - w) * rate_function(d).unwrap();
        prop_assert!(lhs <= rhs + 1e-12 * rhs.max(1.0));
        prop_assert!(rate_function(c).unwrap() >= 0.0);
    }

    #[test]
    fn lecam_dominates_tail_gap(k in 1u64..400, p in 0.0001f64..0.2, m in 0u64..30) {
        let m = m.min(k + 1);
        let gap = (binomial_tail(k, p, m).unwrap() - poisson_tail(k as f64 * p, m).unwrap()).abs();
        prop_assert!(gap <= lecam_bound(k, p).unwrap() + 1e-12);
    }
}
