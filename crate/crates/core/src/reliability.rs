//! System-level false-alert probability for a population of `n` independent
//! innocents, its two-sided bounds, critical population scales and the
//! sharp-threshold phase scan.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tailcore::{self, check_lambda};

/// Largest population accepted by [`system_risk`].
pub const MAX_POPULATION: u64 = 1_000_000_000_000;

/// Largest (real) population the phase scan will instantiate.
pub const MAX_SCAN_POPULATION: f64 = 1e300;

/// How the alert threshold is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    /// Absolute match count `m`.
    Count(u64),
    /// Ratio `c > 1`; the threshold becomes `ceil(c * k * p)`.
    Ratio(f64),
}

/// The `(k, p, m, n)` tuple every screening formula consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScreeningConfig {
    k: u64,
    p: f64,
    threshold: Threshold,
    n: u64,
}

impl ScreeningConfig {
    pub fn new(k: u64, p: f64, threshold: Threshold, n: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("attribute count k must be positive"));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("match probability p must lie in (0, 1), got {p}")));
        }
        match threshold {
            Threshold::Count(0) => return Err(Error::domain("threshold m must be positive")),
            Threshold::Ratio(c) if !(c > 1.0 && c.is_finite()) => {
                return Err(Error::domain(format!("threshold ratio c must exceed 1, got {c}")))
            }
            _ => {}
        }
        if n == 0 {
            return Err(Error::domain("population n must be at least 1"));
        }
        if n > MAX_POPULATION {
            return Err(Error::Range(format!("population {n} exceeds supported {MAX_POPULATION}")));
        }
        Ok(Self { k, p, threshold, n })
    }

    /// Shorthand for an absolute threshold.
    pub fn with_count(k: u64, p: f64, m: u64, n: u64) -> Result<Self> {
        Self::new(k, p, Threshold::Count(m), n)
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn threshold(&self) -> Threshold {
        self.threshold
    }

    /// Expected chance matches per person, `k * p`.
    pub fn lambda(&self) -> f64 {
        self.k as f64 * self.p
    }

    /// Integer threshold after rounding a ratio up.
    pub fn m(&self) -> u64 {
        match self.threshold {
            Threshold::Count(m) => m,
            Threshold::Ratio(c) => (c * self.lambda()).ceil() as u64,
        }
    }

    pub fn with_population(&self, n: u64) -> Result<Self> {
        Self::new(self.k, self.p, self.threshold, n)
    }
}

/// System-level false-alert report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemRisk {
    pub per_person_q: f64,
    pub expected_false_alerts: f64,
    /// `1 - (1 - q)^n`; reads 1.0 once the complement drops below 1e-15.
    pub prob_at_least_one: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `n * ln(1 - q)`, the log of the no-alert probability.
    pub log_complement: f64,
}

/// `(1 - (1-q)^n, n ln(1-q))` for a real population.
pub(crate) fn at_least_one(q: f64, n: f64) -> (f64, f64) {
    let log_complement = if q >= 1.0 { f64::NEG_INFINITY } else { n * (-q).ln_1p() };
    (saturate(-log_complement.exp_m1()), log_complement)
}

/// Probabilities within 1e-15 of one are reported as exactly one.
fn saturate(prob: f64) -> f64 {
    if prob > 1.0 - 1e-15 {
        1.0
    } else {
        prob
    }
}

fn system_risk_real(lambda: f64, m: u64, n: f64) -> Result<SystemRisk> {
    let tail = tailcore::tail_estimate(lambda, m)?;
    let q = tail.exact;
    let (prob, log_complement) = at_least_one(q, n);
    // Robbins at the realized threshold bounds Pr(Y = m) <= q from below.
    let lower_bound = -(-n * tail.robbins_lower).exp_m1();
    let upper_bound = if tail.chernoff_upper < 1.0 {
        let u = tail.chernoff_upper;
        -(-n * u / (1.0 - u)).exp_m1()
    } else {
        1.0
    };
    Ok(SystemRisk {
        per_person_q: q,
        expected_false_alerts: n * q,
        prob_at_least_one: prob,
        lower_bound: saturate(lower_bound),
        upper_bound: saturate(upper_bound),
        log_complement,
    })
}

/// Probability that at least one of `n` innocents is flagged, with the
/// Robbins-based lower and Chernoff-based upper system bounds.
pub fn system_risk(config: &ScreeningConfig) -> Result<SystemRisk> {
    system_risk_real(config.lambda(), config.m(), config.n() as f64)
}

/// Critical population scales at threshold ratio `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPopulation {
    /// `sqrt(2 pi c lambda) exp(lambda D + 1/(12 c lambda))`.
    pub refined: f64,
    /// `sqrt(lambda) exp(lambda D)`.
    pub asymptotic: f64,
    /// `exp(lambda D)`.
    pub rough: f64,
    pub exponent: f64,
}

pub fn critical_population(lambda: f64, c: f64) -> Result<CriticalPopulation> {
    check_lambda(lambda)?;
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::domain(format!("critical population needs c > 1, got {c}")));
    }
    let exponent = lambda * tailcore::rate_function(c)?;
    let cl = c * lambda;
    Ok(CriticalPopulation {
        refined: (2.0 * std::f64::consts::PI * cl).sqrt() * (exponent + 1.0 / (12.0 * cl)).exp(),
        asymptotic: lambda.sqrt() * exponent.exp(),
        rough: exponent.exp(),
        exponent,
    })
}

/// One row of a phase scan or parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub n: f64,
    pub m: u64,
    pub q: f64,
    pub prob: f64,
    pub lower: f64,
    pub upper: f64,
    pub log_complement: f64,
}

impl ScanRow {
    pub const COLUMNS: [&'static str; 8] =
        ["lambda", "n", "m", "q", "prob", "lower", "upper", "log_complement"];
}

fn scan_point(lambda: f64, c: f64, alpha: f64) -> Result<ScanRow> {
    let exponent = lambda * tailcore::rate_function(c)?;
    let n = (lambda.sqrt() * (alpha * exponent).exp()).round().max(1.0);
    if !n.is_finite() || n > MAX_SCAN_POPULATION {
        return Err(Error::Range(format!(
            "population sqrt(lambda) e^(alpha lambda D) overflows at lambda={lambda}, alpha={alpha}"
        )));
    }
    let m = tailcore::threshold_for_ratio(lambda, c)?;
    let risk = system_risk_real(lambda, m, n)?;
    Ok(ScanRow {
        lambda,
        n,
        m,
        q: risk.per_person_q,
        prob: risk.prob_at_least_one,
        lower: risk.lower_bound,
        upper: risk.upper_bound,
        log_complement: risk.log_complement,
    })
}

/// System false-alert probability along `n = sqrt(lambda) exp(alpha lambda D(c))`,
/// `m = ceil(c lambda)`, for each supplied `lambda`. Rows keep input order.
pub fn phase_scan(lambda_values: &[f64], c: f64, alpha: f64) -> Result<Vec<ScanRow>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::domain(format!("phase scan needs c > 1, got {c}")));
    }
    lambda_values
        .par_iter()
        .map(|&lambda| {
            check_lambda(lambda)?;
            scan_point(lambda, c, alpha)
        })
        .collect()
}

/// Width in `alpha` of the band where the phase-scan probability lies in
/// `[low, high]` at fixed `lambda` and `c`, located by bisection.
pub fn transition_width(lambda: f64, c: f64, low: f64, high: f64) -> Result<f64> {
    if !(0.0 < low && low < high && high < 1.0) {
        return Err(Error::domain(format!("band [{low}, {high}] must lie inside (0, 1)")));
    }
    let prob_at = |alpha: f64| scan_point(lambda, c, alpha).map(|r| r.prob);
    let crossing = |level: f64| -> Result<f64> {
        let (mut lo, mut hi) = (1e-9, 1.0);
        while prob_at(hi)? < level {
            hi *= 2.0;
            if hi > 64.0 {
                return Err(Error::Range(format!("no crossing of {level} below alpha=64")));
            }
        }
        if prob_at(lo)? >= level {
            return Ok(lo);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if prob_at(mid)? < level {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    Ok(crossing(high)? - crossing(low)?)
}

/// System risk over a population sweep at fixed `(k, p, m)`.
pub fn population_sweep(k: u64, p: f64, m: u64, populations: &[f64]) -> Result<Vec<ScanRow>> {
    let base = ScreeningConfig::with_count(k, p, m, 1)?;
    populations
        .par_iter()
        .map(|&n| {
            if !(n >= 1.0) || n > MAX_SCAN_POPULATION {
                return Err(Error::Range(format!("population {n} outside [1, 1e300]")));
            }
            let r = system_risk_real(base.lambda(), m, n)?;
            Ok(ScanRow {
                lambda: base.lambda(),
                n,
                m,
                q: r.per_person_q,
                prob: r.prob_at_least_one,
                lower: r.lower_bound,
                upper: r.upper_bound,
                log_complement: r.log_complement,
            })
        })
        .collect()
}
