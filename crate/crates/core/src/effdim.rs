//! Correlation-corrected effective dimensionality.
//!
//! Positively correlated indicators behave like fewer independent ones. The
//! design effect measures the variance inflation of their sum, and `k_eff`
//! is the independent count with matching variance. The adjusted limits
//! below replace `lambda D` by `(k_eff / k) lambda D`; that substitution is a
//! heuristic, so every adjusted output carries `heuristic = true`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tailcore;

/// Design effect `sum_{i != j} rho_ij / k` from per-row off-diagonal sums.
pub fn design_effect(rho_row_sums: &[f64], k: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    let total: f64 = rho_row_sums.iter().sum();
    Ok(total / k as f64)
}

/// Design effect of a full correlation matrix (diagonal ignored).
pub fn design_effect_from_matrix(rho: &[Vec<f64>]) -> Result<f64> {
    let k = rho.len();
    let mut sums = Vec::with_capacity(k);
    for (i, row) in rho.iter().enumerate() {
        if row.len() != k {
            return Err(Error::domain("correlation matrix must be square"));
        }
        sums.push(row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v).sum());
    }
    design_effect(&sums, k as u64)
}

/// `Var(Y) = k p (1 - p) (1 + DEFF)` for a sum of `k` Bernoulli(p) indicators.
pub fn sum_variance(k: u64, p: f64, deff: f64) -> f64 {
    k as f64 * p * (1.0 - p) * (1.0 + deff)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialCorrelation {
    area: f64,
    xi: f64,
}

impl SpatialCorrelation {
    pub fn new(area: f64, xi: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) || !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::domain(format!(
                "area and correlation length must be positive, got A={area}, xi={xi}"
            )));
        }
        Ok(Self { area, xi })
    }
}

/// `A / (2 pi xi^2)`: one independent patch per correlation area.
pub fn k_eff_spatial(corr: &SpatialCorrelation) -> f64 {
    corr.area / (2.0 * PI * corr.xi * corr.xi)
}

#[derive(Debug, Clone, PartialEq)]
pub enum TemporalCorrelation {
    /// `rho(h) = exp(-h / tau)` over `k` observations.
    Exponential { k: u64, tau: f64 },
    /// Explicit `rho(h)` for `h = 1..k-1`; `k = rho.len() + 1`.
    Explicit { rho: Vec<f64> },
}

impl TemporalCorrelation {
    pub fn exponential(k: u64, tau: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k must be positive"));
        }
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::domain(format!("correlation time tau must be positive, got {tau}")));
        }
        Ok(Self::Exponential { k, tau })
    }

    pub fn explicit(rho: Vec<f64>) -> Result<Self> {
        if let Some(bad) = rho.iter().find(|r| !(-1.0..=1.0).contains(*r)) {
            return Err(Error::domain(format!("autocorrelation {bad} outside [-1, 1]")));
        }
        Ok(Self::Explicit { rho })
    }

    pub fn k(&self) -> u64 {
        match self {
            Self::Exponential { k, .. } => *k,
            Self::Explicit { rho } => rho.len() as u64 + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TemporalKeff {
    /// Full Bartlett-Wilks sum `k / (1 + 2 sum rho(h) (1 - h/k))`.
    pub k_eff: f64,
    /// `k (1 - e^{-1/tau}) / (1 + e^{-1/tau})` for exponential correlation.
    pub geometric: Option<f64>,
    /// `k / (2 tau)` for exponential correlation.
    pub simple: Option<f64>,
}

pub fn k_eff_temporal(corr: &TemporalCorrelation) -> TemporalKeff {
    let k = corr.k();
    let kf = k as f64;
    let rho_at = |h: u64| -> f64 {
        match corr {
            TemporalCorrelation::Exponential { tau, .. } => (-(h as f64) / tau).exp(),
            TemporalCorrelation::Explicit { rho } => rho[(h - 1) as usize],
        }
    };
    let mut sum = tailcore::Neumaier::default();
    for h in 1..k {
        sum.add(rho_at(h) * (1.0 - h as f64 / kf));
    }
    let denom = 1.0 + 2.0 * sum.total();
    let k_eff = if denom <= 1.0 { kf } else { kf / denom };
    let (geometric, simple) = match corr {
        TemporalCorrelation::Exponential { tau, .. } => {
            let r = (-1.0 / tau).exp();
            (Some(kf * (1.0 - r) / (1.0 + r)), Some(kf / (2.0 * tau)))
        }
        TemporalCorrelation::Explicit { .. } => (None, None),
    };
    TemporalKeff { k_eff, geometric, simple }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationAdjusted {
    pub k_eff: f64,
    pub reduction_factor: f64,
    pub unadjusted_exponent: f64,
    /// `k_eff p D(c||1)`.
    pub adjusted_exponent: f64,
    /// `exp(-adjusted_exponent)`, a heuristic indication of the tail scale.
    pub adjusted_tail_lower: f64,
    pub unadjusted_n_crit: f64,
    /// `sqrt(k p) exp(adjusted_exponent)`.
    pub adjusted_n_crit: f64,
    pub heuristic: bool,
}

impl CorrelationAdjusted {
    pub const COLUMNS: [&'static str; 7] = [
        "k",
        "k_eff",
        "reduction_factor",
        "exponent_indep",
        "exponent_corr",
        "n_crit_indep",
        "n_crit_corr",
    ];
}

/// Tail exponent and critical population with `k` replaced by `k_eff`.
///
/// With `nonnegative_correlation` set, `k_eff > k` is rejected.
pub fn adjusted_limits(
    k: u64,
    p: f64,
    c: f64,
    k_eff: f64,
    nonnegative_correlation: bool,
) -> Result<CorrelationAdjusted> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
    }
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::domain(format!("threshold ratio c must exceed 1, got {c}")));
    }
    if !(k_eff > 0.0 && k_eff.is_finite()) {
        return Err(Error::domain(format!("k_eff must be positive, got {k_eff}")));
    }
    let kf = k as f64;
    if nonnegative_correlation && k_eff > kf {
        return Err(Error::domain(format!(
            "k_eff={k_eff} exceeds k={k} although correlations are nonnegative"
        )));
    }
    let d = tailcore::rate_function(c)?;
    let lambda = kf * p;
    let unadjusted = lambda * d;
    let adjusted = k_eff * p * d;
    Ok(CorrelationAdjusted {
        k_eff,
        reduction_factor: k_eff / kf,
        unadjusted_exponent: unadjusted,
        adjusted_exponent: adjusted,
        adjusted_tail_lower: (-adjusted).exp(),
        unadjusted_n_crit: lambda.sqrt() * unadjusted.exp(),
        adjusted_n_crit: lambda.sqrt() * adjusted.exp(),
        heuristic: true,
    })
}
