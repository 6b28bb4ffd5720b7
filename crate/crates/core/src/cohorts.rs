//! Heterogeneous populations: groups share the attribute count `k` and the
//! threshold `m` but differ in match probability `p_g`, so each group has its
//! own `lambda_g = k p_g` and per-person tail `q_g`.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tailcore;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cohort {
    pub label: String,
    pub n: u64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortProfile {
    groups: Vec<Cohort>,
}

impl CohortProfile {
    pub fn new(groups: Vec<Cohort>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::domain("cohort profile needs at least one group"));
        }
        let mut seen = HashSet::new();
        for g in &groups {
            if !seen.insert(g.label.as_str()) {
                return Err(Error::domain(format!("duplicate cohort label {:?}", g.label)));
            }
            if g.n == 0 {
                return Err(Error::domain(format!("group {:?} has no members", g.label)));
            }
            if !(g.p > 0.0 && g.p < 1.0) {
                return Err(Error::domain(format!(
                    "group {:?} match probability {} outside (0, 1)",
                    g.label, g.p
                )));
            }
        }
        Ok(Self { groups })
    }

    pub fn groups(&self) -> &[Cohort] {
        &self.groups
    }
}

/// Per-group contribution to system risk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupRow {
    pub label: String,
    pub n: u64,
    pub lambda: f64,
    pub q: f64,
    pub log_q: f64,
    pub mass: f64,
    pub share: f64,
}

impl GroupRow {
    pub const COLUMNS: [&'static str; 7] = ["label", "n", "lambda", "q", "log_q", "mass", "share"];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortRisk {
    /// `1 - prod_g (1 - q_g)^n_g`.
    pub exact: f64,
    /// `1 - exp(-sum_g n_g q_g)`.
    pub exponential_approx: f64,
    pub total_mass: f64,
    pub log_complement: f64,
    pub groups: Vec<GroupRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub dominant_label: String,
    pub dominant_mass: f64,
    pub other_mass: f64,
    pub main_term: f64,
    pub correction_bound: f64,
}

fn group_rows(profile: &CohortProfile, k: u64, m: u64) -> Result<Vec<GroupRow>> {
    if k == 0 {
        return Err(Error::domain("attribute count k must be positive"));
    }
    let mut rows = profile
        .groups
        .iter()
        .map(|g| {
            let lambda = k as f64 * g.p;
            let log_q = tailcore::poisson_log_tail(lambda, m)?;
            let q = log_q.exp();
            Ok(GroupRow {
                label: g.label.clone(),
                n: g.n,
                lambda,
                q,
                log_q,
                mass: g.n as f64 * q,
                share: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = rows.iter().map(|r| r.mass).sum();
    if total > 0.0 {
        for r in &mut rows {
            r.share = r.mass / total;
        }
    }
    Ok(rows)
}

/// Exact system false-alert probability for a heterogeneous population.
pub fn cohort_system_risk(profile: &CohortProfile, k: u64, m: u64) -> Result<CohortRisk> {
    let groups = group_rows(profile, k, m)?;
    let mut log_complement = tailcore::Neumaier::default();
    let mut mass = tailcore::Neumaier::default();
    let mut certain = false;
    for g in &groups {
        if g.q >= 1.0 {
            certain = true;
        } else {
            log_complement.add(g.n as f64 * (-g.q).ln_1p());
        }
        mass.add(g.mass);
    }
    let log_complement = if certain { f64::NEG_INFINITY } else { log_complement.total() };
    let total_mass = mass.total();
    Ok(CohortRisk {
        exact: -log_complement.exp_m1(),
        exponential_approx: -(-total_mass).exp_m1(),
        total_mass,
        log_complement,
        groups,
    })
}

/// Splits system risk into the dominant group `argmax n_g q_g` and a
/// correction bound `(sum_{g != g*} n_g q_g) exp(-n_g* q_g*)`. Ties go to the
/// earliest group.
pub fn dominance_decomposition(profile: &CohortProfile, k: u64, m: u64) -> Result<DominanceReport> {
    let groups = group_rows(profile, k, m)?;
    let mut best = 0;
    for (i, g) in groups.iter().enumerate() {
        if g.mass > groups[best].mass {
            best = i;
        }
    }
    let dominant_mass = groups[best].mass;
    let other_mass: f64 = groups
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, g)| g.mass)
        .sum();
    Ok(DominanceReport {
        dominant_label: groups[best].label.clone(),
        dominant_mass,
        other_mass,
        main_term: -(-dominant_mass).exp_m1(),
        correction_bound: other_mass * (-dominant_mass).exp(),
    })
}

/// `q2 / q1` for two match probabilities `p1 < p2` at common `(k, m)`,
/// evaluated as `exp(ln q2 - ln q1)`.
pub fn disparity_ratio(p1: f64, p2: f64, k: u64, m: u64) -> Result<f64> {
    if !(p1 < p2) {
        return Err(Error::domain(format!("disparity needs p1 < p2, got {p1} and {p2}")));
    }
    for p in [p1, p2] {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!("match probability {p} outside (0, 1)")));
        }
    }
    if k == 0 {
        return Err(Error::domain("attribute count k must be positive"));
    }
    let ln_q1 = tailcore::poisson_log_tail(k as f64 * p1, m)?;
    let ln_q2 = tailcore::poisson_log_tail(k as f64 * p2, m)?;
    Ok((ln_q2 - ln_q1).exp())
}

/// Attribute counts `(m / p2, m / p1)` between which the higher-exposure group
/// has crossed its threshold and the lower-exposure group has not.
pub fn amplification_window(p1: f64, p2: f64, m: u64) -> Result<(f64, f64)> {
    if !(p1 < p2) {
        return Err(Error::domain(format!("window needs p1 < p2, got {p1} and {p2}")));
    }
    if !(p1 > 0.0 && p2 <= 1.0) {
        return Err(Error::domain("match probabilities must lie in (0, 1]"));
    }
    let mf = m as f64;
    Ok((mf / p2, mf / p1))
}
