//! System lifetime under exponential data growth `lambda(t) = k0 p gamma^t`.
//!
//! The analytic critical time is where `lambda(t)` reaches the fixed
//! threshold `m`. The population-corrected time solves
//! `n * q(lambda(t), m) = level` by bisection; the Mills-ratio closed form
//! `m - sqrt(2 m ln n)` is reported only for comparison.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reliability::at_least_one;
use crate::tailcore;

/// Default failure criterion: one expected false alert.
pub const DEFAULT_CRITERION_LEVEL: f64 = 1.0;

const TIME_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthModel {
    k0: f64,
    gamma: f64,
    p: f64,
}

impl GrowthModel {
    pub fn new(k0: f64, gamma: f64, p: f64) -> Result<Self> {
        if !(k0 >= 1.0 && k0.is_finite()) {
            return Err(Error::domain(format!("initial attribute count k0 must be >= 1, got {k0}")));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::domain(format!("growth factor gamma must exceed 1, got {gamma}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("match probability p must lie in (0, 1), got {p}")));
        }
        Ok(Self { k0, gamma, p })
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `k0 * p`, the expected matches at deployment.
    pub fn initial_lambda(&self) -> f64 {
        self.k0 * self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LifetimeReport {
    pub t_star_analytic: f64,
    pub t_star_corrected: f64,
    pub lambda_at_failure: f64,
    pub correction_magnitude: f64,
    /// `m - sqrt(2 m ln n)`; may be negative outside its regime.
    pub closed_form_lambda: f64,
    pub criterion_level: f64,
}

/// Expected matches per person at time `t`.
pub fn lambda_at(model: &GrowthModel, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("time must be nonnegative, got {t}")));
    }
    let ln_lambda = model.initial_lambda().ln() + t * model.gamma.ln();
    let lambda = ln_lambda.exp();
    if !lambda.is_finite() {
        return Err(Error::Range(format!("lambda(t) overflows at t={t}")));
    }
    Ok(lambda)
}

/// `log(m / (k0 p)) / log(gamma)`, or 0 if the threshold is already reached.
pub fn critical_time_analytic(model: &GrowthModel, m: u64) -> f64 {
    let ratio = m as f64 / model.initial_lambda();
    if ratio <= 1.0 {
        0.0
    } else {
        ratio.ln() / model.gamma.ln()
    }
}

/// Population-corrected critical time with the default criterion level.
pub fn critical_time_corrected(model: &GrowthModel, m: u64, n: u64) -> Result<LifetimeReport> {
    critical_time_at_level(model, m, n, DEFAULT_CRITERION_LEVEL)
}

/// Solves `n * q(lambda(t), m) = level` for `t` on
/// `[0, t_analytic + 10 / ln gamma]` to an absolute tolerance of 1e-9.
pub fn critical_time_at_level(
    model: &GrowthModel,
    m: u64,
    n: u64,
    level: f64,
) -> Result<LifetimeReport> {
    if m == 0 {
        return Err(Error::domain("threshold m must be positive"));
    }
    if n == 0 {
        return Err(Error::domain("population n must be at least 1"));
    }
    if !(level > 0.0 && level.is_finite()) {
        return Err(Error::domain(format!("criterion level must be positive, got {level}")));
    }
    let nf = n as f64;
    let ln_target = (level / nf).ln();
    // work with ln q to stay finite deep in the tail
    let excess = |t: f64| -> Result<f64> {
        Ok(tailcore::poisson_log_tail(lambda_at(model, t)?, m)? - ln_target)
    };

    let t_analytic = critical_time_analytic(model, m);
    let mut lo = 0.0;
    let mut hi = t_analytic + 10.0 / model.gamma.ln();
    let at_zero = excess(lo)?;
    if at_zero >= 0.0 {
        return Err(Error::NotBracketed {
            value: nf * tailcore::poisson_tail(model.initial_lambda(), m)?,
            level,
        });
    }
    // q < 1 for every finite lambda, so n q never reaches a level >= n
    if level >= nf || excess(hi)? < 0.0 {
        return Err(Error::Unreachable { level, t_max: hi });
    }
    while hi - lo > TIME_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let mf = m as f64;
    Ok(LifetimeReport {
        t_star_analytic: t_analytic,
        t_star_corrected: t_star,
        lambda_at_failure: lambda_at(model, t_star)?,
        correction_magnitude: t_analytic - t_star,
        closed_form_lambda: mf - (2.0 * mf * nf.ln()).sqrt(),
        criterion_level: level,
    })
}

/// One time-series row: `(t, lambda, q, n q, prob)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeRow {
    pub t: f64,
    pub lambda: f64,
    pub q: f64,
    pub expected_alerts: f64,
    pub prob: f64,
}

impl TimeRow {
    pub const COLUMNS: [&'static str; 5] = ["t", "lambda", "q", "expected_alerts", "prob"];
}

/// Per-person and system false-alert probability along a time grid.
pub fn time_series(model: &GrowthModel, m: u64, n: u64, times: &[f64]) -> Result<Vec<TimeRow>> {
    times
        .iter()
        .map(|&t| {
            let lambda = lambda_at(model, t)?;
            let q = tailcore::poisson_tail(lambda, m)?;
            let (prob, _) = at_least_one(q, n as f64);
            Ok(TimeRow {
                t,
                lambda,
                q,
                expected_alerts: n as f64 * q,
                prob,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn border() -> GrowthModel {
        GrowthModel::new(100.0, 1.5, 0.01).unwrap()
    }

    #[test]
    fn lambda_growth() {
        assert!((lambda_at(&border(), 0.0).unwrap() - 1.0).abs() < 1e-15);
        let t5 = 5f64.ln() / 1.5f64.ln();
        assert!((t5 - 3.97).abs() < 0.01);
        assert!((lambda_at(&border(), t5).unwrap() - 5.0).abs() < 1e-12);
        let doubling = GrowthModel::new(100.0, 2.0, 0.01).unwrap();
        assert!((lambda_at(&doubling, 1.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(lambda_at(&doubling, 5000.0), Err(Error::Range(_))));
        assert!(lambda_at(&doubling, -1.0).is_err());
    }

    #[test]
    fn analytic_table() {
        let m = border();
        assert!((critical_time_analytic(&m, 5) - 4.0).abs() < 0.05);
        assert!((critical_time_analytic(&m, 10) - 5.7).abs() < 0.05);
        assert!((critical_time_analytic(&m, 3) - 2.7).abs() < 0.05);
        let fast = GrowthModel::new(100.0, 2.0, 0.01).unwrap();
        assert!((critical_time_analytic(&fast, 5) - 2.3).abs() < 0.05);
        let saturated = GrowthModel::new(500.0, 1.5, 0.01).unwrap();
        assert_eq!(critical_time_analytic(&saturated, 5), 0.0);
    }

    #[test]
    fn doubling_threshold_adds_log2_over_log_gamma() {
        for g in [1.5, 2.0, 3.0] {
            let model = GrowthModel::new(100.0, g, 0.01).unwrap();
            let d = critical_time_analytic(&model, 10) - critical_time_analytic(&model, 5);
            assert!((d - 2f64.ln() / g.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn single_person_is_unreachable() {
        assert!(matches!(
            critical_time_corrected(&border(), 5, 1),
            Err(Error::Unreachable { .. })
        ));
    }

    #[test]
    fn already_failed_is_not_bracketed() {
        let model = GrowthModel::new(100.0, 1.5, 0.05).unwrap();
        assert!(matches!(
            critical_time_corrected(&model, 5, 1_000_000),
            Err(Error::NotBracketed { .. })
        ));
    }

    #[test]
    fn large_population_fails_early() {
        let r = critical_time_corrected(&border(), 20, 1_000_000).unwrap();
        assert!((r.t_star_analytic - 7.39).abs() < 0.01);
        assert!(r.t_star_corrected < r.t_star_analytic);
        // the closed form overshoots below zero here
        assert!(r.closed_form_lambda < 0.0);
        let smaller = critical_time_corrected(&border(), 20, 1000).unwrap();
        assert!(smaller.t_star_corrected > r.t_star_corrected);
    }

    // reference root 59.43632069812285 from an independent Brent solve on the
    // Poisson survival function
    #[test]
    fn corrected_lambda_against_reference_root() {
        let r = critical_time_corrected(&border(), 100, 1_000_000).unwrap();
        assert!((r.lambda_at_failure - 59.436_320_698).abs() < 1e-6, "{}", r.lambda_at_failure);
        assert!((r.closed_form_lambda - 47.434_782_302).abs() < 1e-6);
        assert!(r.closed_form_lambda < r.lambda_at_failure);
    }

    #[test]
    fn root_residual_is_small() {
        for (m, n) in [(5u64, 10u64), (20, 1_000_000), (100, 1_000_000), (8, 2)] {
            let r = critical_time_corrected(&border(), m, n).unwrap();
            let q = tailcore::poisson_tail(r.lambda_at_failure, m).unwrap();
            assert!((n as f64 * q - 1.0).abs() <= 1e-6, "m={m} n={n}");
        }
    }

    #[test]
    fn criterion_level_shifts_root() {
        let one = critical_time_at_level(&border(), 10, 1000, 1.0).unwrap();
        let tenth = critical_time_at_level(&border(), 10, 1000, 0.1).unwrap();
        assert!(tenth.t_star_corrected < one.t_star_corrected);
        assert!(critical_time_at_level(&border(), 10, 1000, 0.0).is_err());
    }
}
