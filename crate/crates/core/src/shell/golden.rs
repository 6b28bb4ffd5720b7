//! Registry of worked-example values, recomputed from the library and
//! compared against their published figures.

use std::path::Path;

use serde::Serialize;

use super::table::{write_file, Table};
use crate::cohorts::{self, Cohort, CohortProfile};
use crate::effdim::{self, SpatialCorrelation, TemporalCorrelation};
use crate::error::Result;
use crate::lifetime::{self, GrowthModel};
use crate::posterior::{self, BayesContext, Regime};
use crate::reliability;
use crate::tailcore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tolerance {
    Absolute,
    Relative,
}

impl Tolerance {
    fn as_str(&self) -> &'static str {
        match self {
            Tolerance::Absolute => "abs",
            Tolerance::Relative => "rel",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenRow {
    pub id: &'static str,
    pub quantity: &'static str,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub tolerance_kind: Tolerance,
}

impl GoldenRow {
    pub fn deviation(&self) -> f64 {
        let diff = (self.computed - self.expected).abs();
        match self.tolerance_kind {
            Tolerance::Absolute => diff,
            Tolerance::Relative => diff / self.expected.abs(),
        }
    }

    /// Passes when the deviation is within tolerance; with zero tolerance
    /// only an exact match passes.
    pub fn pass(&self) -> bool {
        self.deviation() <= self.tolerance
    }
}

fn row(
    id: &'static str,
    quantity: &'static str,
    computed: f64,
    expected: f64,
    tolerance: f64,
    tolerance_kind: Tolerance,
) -> GoldenRow {
    GoldenRow { id, quantity, computed, expected, tolerance, tolerance_kind }
}

use Tolerance::{Absolute as Abs, Relative as Rel};

/// Computes every registry value. `tolerance_scale` multiplies each
/// tolerance; `1.0` is the published setting and `0.0` demands exact equality.
pub fn golden_rows(tolerance_scale: f64) -> Result<Vec<GoldenRow>> {
    let mut rows = Vec::new();

    // Intro example: lambda = 5, m = 15, n = 1e6.
    let q = tailcore::poisson_tail(5.0, 15)?;
    let (_, log_complement) = reliability::at_least_one(q, 1e6);
    rows.push(row("intro_q", "Pr(Pois(5) >= 15)", q, 2.26e-4, 0.01, Rel));
    rows.push(row("intro_alerts", "expected false alerts n q", 1e6 * q, 226.0, 1.0, Abs));
    rows.push(row("intro_log_complement", "ln Pr(no false alert)", log_complement, -226.0, 1.0, Abs));

    // System lifetimes under k(t) = 100 gamma^t, p = 0.01.
    for (id, gamma, m, expected) in [
        ("lifetime_m3", 1.5, 3, 2.7),
        ("lifetime_m5", 1.5, 5, 4.0),
        ("lifetime_m10", 1.5, 10, 5.7),
        ("lifetime_m5_gamma2", 2.0, 5, 2.3),
    ] {
        let model = GrowthModel::new(100.0, gamma, 0.01)?;
        rows.push(row(id, "analytic system lifetime T*", lifetime::critical_time_analytic(&model, m), expected, 0.05, Abs));
    }

    // Two neighborhoods: n = 1e5 each, k = 100, m = 3.
    let profile = CohortProfile::new(vec![
        Cohort { label: "A".into(), n: 100_000, p: 0.005 },
        Cohort { label: "B".into(), n: 100_000, p: 0.02 },
    ])?;
    let risk = cohorts::cohort_system_risk(&profile, 100, 3)?;
    let (a, b) = (&risk.groups[0], &risk.groups[1]);
    rows.push(row("cohort_q_a", "q_A = Pr(Pois(0.5) >= 3)", a.q, 0.014, 0.001, Abs));
    rows.push(row("cohort_q_b", "q_B = Pr(Pois(2) >= 3)", b.q, 0.323, 0.001, Abs));
    rows.push(row("cohort_mass_a", "expected false alerts n_A q_A", a.mass, 1400.0, 0.01, Rel));
    rows.push(row("cohort_mass_b", "expected false alerts n_B q_B", b.mass, 32300.0, 0.01, Rel));
    rows.push(row(
        "cohort_ratio",
        "disparity q_B / q_A",
        cohorts::disparity_ratio(0.005, 0.02, 100, 3)?,
        23.0,
        0.05,
        Rel,
    ));

    // Forensic database: q = 1e-12, n = 1e6.
    let dna = BayesContext::new(1.0, 1.0, 0.5, 1e-12, 1_000_000)?;
    let verdict = posterior::classify_regime(&dna);
    rows.push(row("dna_nq", "expected false matches n q", verdict.nq, 1e-6, 1e-3, Rel));
    rows.push(row(
        "dna_evidential",
        "regime is evidential (1 = yes)",
        f64::from(u8::from(verdict.regime == Regime::Evidential)),
        1.0,
        0.0,
        Abs,
    ));

    // Spatial correlation: A = 1e8 m^2, xi = 500 m, k = 10000, p = 0.005, c = 1.5.
    let k_eff_spatial = effdim::k_eff_spatial(&SpatialCorrelation::new(1e8, 500.0)?);
    let wide = effdim::adjusted_limits(10_000, 0.005, 1.5, k_eff_spatial, true)?;
    let crit = reliability::critical_population(50.0, 1.5)?;
    rows.push(row("keff_spatial", "k_eff = A / (2 pi xi^2)", k_eff_spatial, 63.66, 0.01, Rel));
    rows.push(row("exponent_spatial", "(k_eff / k) lambda D(1.5)", wide.adjusted_exponent, 0.0345, 0.02, Rel));
    rows.push(row("ncrit_independent", "sqrt(lambda) exp(lambda D), lambda = 50", crit.asymptotic, 1560.0, 0.05, Rel));
    rows.push(row("ncrit_spatial", "correlation-adjusted n_crit", wide.adjusted_n_crit, 7.0, 0.10, Rel));

    // Daily monitoring: k = 365, tau = 30, p = 0.02, m = 12.
    let temporal = effdim::k_eff_temporal(&TemporalCorrelation::exponential(365, 30.0)?);
    let k_eff_daily = temporal.simple.expect("exponential correlation has k/(2 tau)");
    let daily = effdim::adjusted_limits(365, 0.02, 12.0 / 7.3, k_eff_daily, true)?;
    rows.push(row("keff_temporal", "k_eff = k / (2 tau)", k_eff_daily, 6.08, 0.005, Abs));
    rows.push(row("exponent_temporal", "(k_eff / k) lambda D(12/7.3)", daily.adjusted_exponent, 0.021, 0.02, Rel));
    rows.push(row("ncrit_daily_independent", "sqrt(lambda) exp(lambda D), lambda = 7.3", daily.unadjusted_n_crit, 9.5, 0.10, Rel));
    rows.push(row("ncrit_daily", "correlation-adjusted n_crit", daily.adjusted_n_crit, 2.8, 0.10, Rel));

    for r in &mut rows {
        r.tolerance *= tolerance_scale;
    }
    Ok(rows)
}

pub const COLUMNS: [&str; 8] =
    ["id", "quantity", "computed", "expected", "tolerance", "tolerance_kind", "deviation", "pass"];

pub fn golden_table(rows: &[GoldenRow]) -> Table {
    let mut table = Table::new("worked-example registry: computed value vs published value", &COLUMNS);
    for r in rows {
        table.push(vec![
            r.id.into(),
            r.quantity.into(),
            r.computed.into(),
            r.expected.into(),
            r.tolerance.into(),
            r.tolerance_kind.as_str().into(),
            r.deviation().into(),
            r.pass().into(),
        ]);
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenReport {
    pub rows: Vec<GoldenRow>,
    pub failures: Vec<&'static str>,
    pub sha256: String,
}

impl GoldenReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Writes the registry report to `out` as CSV and returns it.
pub fn worked_examples(out: &Path, tolerance_scale: f64) -> Result<GoldenReport> {
    let rows = golden_rows(tolerance_scale)?;
    let sha256 = write_file(out, &golden_table(&rows).to_csv())?;
    let failures = rows.iter().filter(|r| !r.pass()).map(|r| r.id).collect();
    Ok(GoldenReport { rows, failures, sha256 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique() {
        let rows = golden_rows(1.0).unwrap();
        let mut ids: Vec<_> = rows.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), rows.len());
    }

    #[test]
    fn zero_tolerance_fails_rounded_rows() {
        let rows = golden_rows(0.0).unwrap();
        for id in ["intro_q", "lifetime_m5", "cohort_q_a", "keff_spatial"] {
            assert!(!rows.iter().find(|r| r.id == id).unwrap().pass(), "{id}");
        }
    }
}
