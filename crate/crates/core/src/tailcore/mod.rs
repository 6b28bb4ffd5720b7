//! Poisson and binomial tail machinery.
//!
//! Everything downstream consumes one of three quantities from here: the
//! exact per-person tail `q = Pr(Y >= m)`, its logarithm, or the pair of
//! closed-form bounds that sandwich it. The large-deviation rate
//! `D(c||1) = c ln c - c + 1` ties them together: the Chernoff bound is
//! `exp(-lambda D(m/lambda))` and the Robbins/Stirling bound adds a
//! `(2 pi c lambda)^(-1/2)` prefactor.

mod special;

pub(crate) use special::Neumaier;

use serde::Serialize;

use crate::error::{Error, Result};

/// Ratio `c = m / lambda` together with the rate `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInput {
    c: f64,
    lambda: f64,
}

impl RateInput {
    pub fn new(c: f64, lambda: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("ratio c must be positive, got {c}")));
        }
        check_lambda(lambda)?;
        Ok(Self { c, lambda })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The large-deviation exponent `lambda * D(c||1)`.
    pub fn exponent(&self) -> f64 {
        self.lambda * deviance(self.c)
    }
}

/// Exact tail together with both closed-form bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEstimate {
    pub exact: f64,
    pub chernoff_upper: f64,
    pub robbins_lower: f64,
    pub log_exact: f64,
    /// `lambda * D(m/lambda || 1)`; kept separately so clamping never hides it.
    pub exponent: f64,
}

/// Domain sizes for the zero-intersection hypergeometric overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlapInput {
    domain_size: u64,
    person_list: u64,
    suspicious_list: u64,
}

impl OverlapInput {
    pub fn new(domain_size: u64, person_list: u64, suspicious_list: u64) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::domain("domain size V must be positive"));
        }
        if person_list > domain_size || suspicious_list > domain_size {
            return Err(Error::domain(format!(
                "list sizes t={person_list}, s={suspicious_list} exceed domain V={domain_size}"
            )));
        }
        Ok(Self {
            domain_size,
            person_list,
            suspicious_list,
        })
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda must be positive and finite, got {lambda}")))
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// `c ln c - c + 1` without the cancellation the naive form suffers near 1.
fn deviance(c: f64) -> f64 {
    if c == 1.0 {
        0.0
    } else {
        special::bd0(c, 1.0)
    }
}

/// Poisson large-deviation rate `D(c||1) = c ln c - c + 1`.
pub fn rate_function(c: f64) -> Result<f64> {
    if !(c > 0.0) || c.is_nan() {
        return Err(Error::domain(format!("rate function needs c > 0, got {c}")));
    }
    if c.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(deviance(c))
}

/// Threshold used when a ratio is supplied: `m = ceil(c * lambda)`.
pub fn threshold_for_ratio(lambda: f64, c: f64) -> Result<u64> {
    check_lambda(lambda)?;
    let m = (c * lambda).ceil();
    if !(m >= 0.0) || m > u64::MAX as f64 {
        return Err(Error::Range(format!("threshold c*lambda = {} not representable", c * lambda)));
    }
    Ok(m as u64)
}

/// `ln Pr(Poisson(lambda) >= m)`; finite even when the tail underflows.
pub fn poisson_log_tail(lambda: f64, m: u64) -> Result<f64> {
    check_lambda(lambda)?;
    if m == 0 {
        return Ok(0.0);
    }
    Ok(special::ln_upper_poisson_tail(lambda, m))
}

/// `Pr(Poisson(lambda) >= m)`.
pub fn poisson_tail(lambda: f64, m: u64) -> Result<f64> {
    Ok(poisson_log_tail(lambda, m)?.exp().min(1.0))
}

/// `Pr(Binomial(k, p) >= m)` by compensated summation of saddle-point masses.
pub fn binomial_tail(k: u64, p: f64, m: u64) -> Result<f64> {
    check_probability("p", p)?;
    if m > k + 1 {
        return Err(Error::domain(format!("threshold m={m} exceeds k+1={}", k + 1)));
    }
    if m == 0 {
        return Ok(1.0);
    }
    if m > k {
        return Ok(0.0);
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    let mut sum = Neumaier::default();
    for x in m..=k {
        let term = special::ln_binomial_pmf(x, k, p).exp();
        sum.add(term);
        // past the mode the masses only shrink
        if x as f64 > k as f64 * p && term < sum.total() * 1e-18 {
            break;
        }
    }
    Ok(sum.total().clamp(0.0, 1.0))
}

/// Chernoff upper bound `exp(-lambda D(m/lambda))`, valid for `m > lambda`.
pub fn chernoff_upper(lambda: f64, m: f64) -> Result<f64> {
    Ok((-chernoff_exponent(lambda, m)?).exp().min(1.0))
}

/// Exponent of [`chernoff_upper`], `lambda D(m/lambda || 1)`.
pub fn chernoff_exponent(lambda: f64, m: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(m > lambda) {
        return Err(Error::domain(format!(
            "Chernoff bound needs m > lambda (upper tail), got m={m}, lambda={lambda}"
        )));
    }
    Ok(lambda * deviance(m / lambda))
}

/// Robbins/Stirling lower bound
/// `(2 pi c lambda)^(-1/2) exp(-lambda D(c) - 1/(12 c lambda))` for `c > 1`.
pub fn robbins_lower(lambda: f64, c: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::domain(format!("Robbins bound needs c > 1, got {c}")));
    }
    Ok(ln_robbins(lambda, c * lambda).exp().min(1.0))
}

/// Log of the Stirling lower bound on `Pr(Y = x)` for a real point `x > 0`;
/// a rigorous bound on the mass whenever `x` is an integer `>= 1`.
pub(crate) fn ln_robbins(lambda: f64, x: f64) -> f64 {
    -0.5 * (2.0 * std::f64::consts::PI * x).ln() - lambda * deviance(x / lambda) - 1.0 / (12.0 * x)
}

/// Exact tail plus both bounds for integer threshold `m`.
///
/// The bounds are taken at the realized ratio `m / lambda`. When `m <= lambda`
/// the Chernoff bound does not apply and is reported as 1.
pub fn tail_estimate(lambda: f64, m: u64) -> Result<TailEstimate> {
    let log_exact = poisson_log_tail(lambda, m)?;
    let mf = m as f64;
    let (chernoff_upper, exponent) = if mf > lambda {
        let e = chernoff_exponent(lambda, mf)?;
        ((-e).exp().min(1.0), e)
    } else {
        (1.0, 0.0)
    };
    let robbins_lower = if m == 0 {
        1.0
    } else {
        ln_robbins(lambda, mf).exp().min(1.0)
    };
    Ok(TailEstimate {
        exact: log_exact.exp().min(1.0),
        chernoff_upper,
        robbins_lower,
        log_exact,
        exponent,
    })
}

/// Probability that a suspicious list of size `s` drawn from a domain of `V`
/// items shares at least one item with a person's list of size `t`.
pub fn overlap_probability(input: OverlapInput) -> f64 {
    let OverlapInput {
        domain_size: v,
        person_list: t,
        suspicious_list: s,
    } = input;
    if s > v - t {
        return 1.0;
    }
    if t == 0 || s == 0 {
        return 0.0;
    }
    let tf = t as f64;
    let ln_miss: f64 = (0..s).map(|l| (-tf / (v - l) as f64).ln_1p()).sum();
    -ln_miss.exp_m1()
}

/// Le Cam total-variation bound `2 k p^2` between Binomial(k, p) and Poisson(kp).
pub fn lecam_bound(k: u64, p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(2.0 * k as f64 * p * p)
}
