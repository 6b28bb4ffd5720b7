//! Bayesian actionability of a flag: positive predictive value, false
//! discovery rate, posterior odds and the population scale beyond which a
//! flag can no longer reach a desired posterior level.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BayesContext {
    /// Expected number of true targets in the population.
    pub r: f64,
    /// Sensitivity.
    pub s: f64,
    /// Desired posterior (PPV) level.
    pub alpha: f64,
    /// Per-person false-positive rate.
    pub q: f64,
    pub n: u64,
}

impl BayesContext {
    pub fn new(r: f64, s: f64, alpha: f64, q: f64, n: u64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("expected targets r must be positive, got {r}")));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::domain(format!("sensitivity s must lie in (0, 1], got {s}")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::domain(format!("false-positive rate q must lie in [0, 1], got {q}")));
        }
        if n == 0 || r > n as f64 {
            return Err(Error::domain(format!("need 0 < r <= n, got r={r}, n={n}")));
        }
        Ok(Self { r, s, alpha, q, n })
    }

    /// Base rate `pi = r / n`.
    pub fn base_rate(&self) -> f64 {
        self.r / self.n as f64
    }

    /// Expected false flags `n q`.
    pub fn expected_false(&self) -> f64 {
        self.n as f64 * self.q
    }

    /// Expected true flags `r s`.
    pub fn expected_true(&self) -> f64 {
        self.r * self.s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PpvReport {
    pub ppv: f64,
    pub fdr: f64,
    /// `r s / (r s + n q)`.
    pub sparse_ppv: f64,
}

/// Exact Bayes PPV `s pi / (s pi + q (1 - pi))` with its FDR and the sparse
/// approximation.
pub fn ppv(ctx: &BayesContext) -> Result<PpvReport> {
    let pi = ctx.base_rate();
    let hit = ctx.s * pi;
    let false_hit = ctx.q * (1.0 - pi);
    let denom = hit + false_hit;
    if !(denom > 0.0) {
        return Err(Error::domain("no flags possible: s*pi + q*(1-pi) = 0"));
    }
    Ok(PpvReport {
        ppv: hit / denom,
        fdr: false_hit / denom,
        sparse_ppv: sparse_ppv(ctx.r, ctx.s, ctx.q, ctx.n as f64),
    })
}

/// Sparse-regime PPV `r s / (r s + n q)` at a real-valued population.
pub fn sparse_ppv(r: f64, s: f64, q: f64, n: f64) -> f64 {
    let rs = r * s;
    rs / (rs + n * q)
}

/// Odds that may be infinite (a certain event).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Odds {
    Finite(f64),
    Infinite,
}

impl Odds {
    /// Odds `x / (1 - x)` for a probability.
    pub fn from_probability(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!("probability {x} outside [0, 1]")));
        }
        Ok(if x == 1.0 { Odds::Infinite } else { Odds::Finite(x / (1.0 - x)) })
    }

    pub fn probability(&self) -> f64 {
        match *self {
            Odds::Finite(o) => o / (1.0 + o),
            Odds::Infinite => 1.0,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Odds::Finite(o) => o,
            Odds::Infinite => f64::INFINITY,
        }
    }
}

/// Posterior odds `lr * prior_odds`.
pub fn posterior_odds(lr: f64, prior_odds: f64) -> Result<f64> {
    if !(lr > 0.0 && lr.is_finite()) || !(prior_odds > 0.0 && prior_odds.is_finite()) {
        return Err(Error::domain(format!(
            "posterior odds need positive finite inputs, got lr={lr}, prior={prior_odds}"
        )));
    }
    Ok(lr * prior_odds)
}

/// Likelihood ratio `s / q`; infinite for a perfectly specific test.
pub fn likelihood_ratio(s: f64, q: f64) -> Result<Odds> {
    if !(s > 0.0 && s <= 1.0) || !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("need s in (0,1] and q in [0,1], got s={s}, q={q}")));
    }
    Ok(if q == 0.0 { Odds::Infinite } else { Odds::Finite(s / q) })
}

/// Posterior odds of a flag from sensitivity, false-positive rate and base rate.
pub fn flag_posterior_odds(s: f64, q: f64, pi: f64) -> Result<Odds> {
    let lr = likelihood_ratio(s, q)?;
    let prior = Odds::from_probability(pi)?;
    if pi == 0.0 {
        return Err(Error::domain("base rate must be positive"));
    }
    Ok(match (lr, prior) {
        (Odds::Finite(l), Odds::Finite(o)) => Odds::Finite(posterior_odds(l, o)?),
        _ => Odds::Infinite,
    })
}

/// Largest population at which a flag still reaches posterior level `alpha`
/// in the sparse regime: `(1 - alpha) r s / (alpha q)`.
pub fn bayes_critical_population(r: f64, s: f64, alpha: f64, q: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie strictly inside (0, 1), got {alpha}")));
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::domain(format!("q must lie in (0, 1], got {q}")));
    }
    if !(r > 0.0) || !(s > 0.0 && s <= 1.0) {
        return Err(Error::domain(format!("need r > 0 and s in (0, 1], got r={r}, s={s}")));
    }
    Ok((1.0 - alpha) * r * s / (alpha * q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `n q <= 0.1 r s`
    Evidential,
    Transitional,
    /// `n q >= 10 r s`
    Collapsed,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Evidential => "evidential",
            Regime::Transitional => "transitional",
            Regime::Collapsed => "collapsed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeVerdict {
    pub nq: f64,
    pub rs: f64,
    pub regime: Regime,
    pub frequentist_reliable: bool,
}

pub fn classify_regime(ctx: &BayesContext) -> RegimeVerdict {
    let nq = ctx.expected_false();
    let rs = ctx.expected_true();
    let regime = if nq <= 0.1 * rs {
        Regime::Evidential
    } else if nq >= 10.0 * rs {
        Regime::Collapsed
    } else {
        Regime::Transitional
    };
    RegimeVerdict {
        nq,
        rs,
        regime,
        frequentist_reliable: nq < 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppv_edges() {
        let all = BayesContext::new(50.0, 0.3, 0.5, 0.2, 50).unwrap();
        assert_eq!(ppv(&all).unwrap().ppv, 1.0);
        let perfect = BayesContext::new(5.0, 0.7, 0.5, 0.0, 1000).unwrap();
        assert_eq!(ppv(&perfect).unwrap().ppv, 1.0);
    }

    #[test]
    fn surveillance_ppv() {
        let ctx = BayesContext::new(10.0, 0.9, 0.5, 2.26e-4, 1_000_000).unwrap();
        let r = ppv(&ctx).unwrap();
        assert!((r.sparse_ppv - 9.0 / 235.0).abs() < 1e-12);
        assert!((r.ppv - 0.0383).abs() < 1e-4);
        assert!((r.ppv + r.fdr - 1.0).abs() < 1e-15);
    }

    #[test]
    fn odds_examples() {
        let dna = flag_posterior_odds(1.0, 1e-12, 1e-6).unwrap().value();
        assert!((dna / 1e6 - 1.0).abs() < 1e-5);
        assert_eq!(posterior_odds(1.0, 0.25).unwrap(), 0.25);
        let surveillance = flag_posterior_odds(0.9, 2.26e-4, 1e-5).unwrap();
        assert!((surveillance.value() - 0.0398).abs() < 1e-4);
        assert!((surveillance.probability() - 0.0383).abs() < 1e-4);
        assert_eq!(Odds::from_probability(1.0).unwrap(), Odds::Infinite);
        assert_eq!(flag_posterior_odds(0.9, 0.1, 1.0).unwrap(), Odds::Infinite);
        assert!(posterior_odds(0.0, 1.0).is_err());
    }

    #[test]
    fn critical_population_examples() {
        let n = bayes_critical_population(10.0, 0.9, 0.9, 1e-6).unwrap();
        assert!((n - 1e6).abs() < 1e-6);
        assert!((sparse_ppv(10.0, 0.9, 1e-6, n) - 0.9).abs() < 1e-12);
        let near_one = bayes_critical_population(10.0, 0.9, 1.0 - 1e-12, 1e-6).unwrap();
        assert!(near_one < 1e-4);
        assert!(bayes_critical_population(10.0, 0.9, 1.0, 1e-6).is_err());
        assert!(bayes_critical_population(10.0, 0.9, 0.0, 1e-6).is_err());
    }

    #[test]
    fn regimes() {
        let dna = BayesContext::new(1.0, 1.0, 0.5, 1e-12, 1_000_000).unwrap();
        let v = classify_regime(&dna);
        assert_eq!(v.regime, Regime::Evidential);
        assert!(v.frequentist_reliable);
        assert!((v.nq - 1e-6).abs() < 1e-18);

        let surv = BayesContext::new(10.0, 0.9, 0.5, 2.26e-4, 1_000_000).unwrap();
        let v = classify_regime(&surv);
        assert_eq!(v.regime, Regime::Collapsed);
        assert!(!v.frequentist_reliable);

        // n q = r s = 9
        let edge = BayesContext::new(10.0, 0.9, 0.5, 9e-6, 1_000_000).unwrap();
        assert_eq!(classify_regime(&edge).regime, Regime::Transitional);
    }
}
