//! Plot-ready datasets for the four phase-transition panels.
//!
//! | file | sweep | fixed |
//! |------|-------|-------|
//! | `panel_a.csv` | `k` = 50..300 step 10 | `p = 0.01`, `m = 7`, `n = 1000`, Monte Carlo overlay |
//! | `panel_b.csv` | `log10 n` = 0..8 step 0.25 | `k = 1000`, `p = 0.005`, `m = 15` |
//! | `panel_c.csv` | `t` = 0..8 step 0.05 | `k0 = 100`, `gamma = 1.5`, `p = 0.01`, `m = 5`, `n = 1` |
//! | `panel_d.csv` | `k` = 50..2000 step 50 | groups `p = 0.005` / `0.02`, `n = 1e5` each, `m = 7` |
//!
//! Every Monte Carlo point uses its own seed `seed + index`, so output does
//! not depend on the thread count.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::table::{write_file, Table};
use crate::cohorts::{self, Cohort, CohortProfile};
use crate::error::{Error, Result};
use crate::lifetime::{self, GrowthModel, TimeRow};
use crate::reliability::{self, ScanRow, ScreeningConfig};
use crate::simkit::{self, SimMode, SimPlan};
use crate::tailcore;

/// Sweep settings for all four panels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelSettings {
    pub a_k: Vec<u64>,
    pub a_p: f64,
    pub a_m: u64,
    pub a_n: u64,
    pub b_k: u64,
    pub b_p: f64,
    pub b_m: u64,
    pub b_log10_n: Vec<f64>,
    pub c_k0: f64,
    pub c_gamma: f64,
    pub c_p: f64,
    pub c_m: u64,
    pub c_n: u64,
    pub c_t: Vec<f64>,
    pub d_k: Vec<u64>,
    pub d_p: [f64; 2],
    pub d_n: u64,
    pub d_m: u64,
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step).round() as usize;
    (0..=count).map(|i| start + i as f64 * step).collect()
}

impl Default for PanelSettings {
    fn default() -> Self {
        Self {
            a_k: (50..=300).step_by(10).collect(),
            a_p: 0.01,
            a_m: 7,
            a_n: 1000,
            b_k: 1000,
            b_p: 0.005,
            b_m: 15,
            b_log10_n: grid(0.0, 8.0, 0.25),
            c_k0: 100.0,
            c_gamma: 1.5,
            c_p: 0.01,
            c_m: 5,
            c_n: 1,
            c_t: grid(0.0, 8.0, 0.05),
            d_k: (50..=2000).step_by(50).collect(),
            d_p: [0.005, 0.02],
            d_n: 100_000,
            d_m: 7,
        }
    }
}

/// Panel (a): system risk along a `k` sweep, analytic curves plus Monte Carlo.
pub fn panel_a(s: &PanelSettings, runs: u64, seed: u64) -> Result<Table> {
    let mut table = Table::new(
        "panel a: system false-alert probability vs attribute count k; prob_binomial is the simulated model, mc_* are Monte Carlo points",
        &[
            "k",
            "lambda",
            "m",
            "n",
            "q_binomial",
            "q_poisson",
            "prob_binomial",
            "prob_poisson",
            "lower",
            "upper",
            "mc_estimate",
            "mc_std_error",
            "mc_abs_error",
            "runs",
        ],
    );
    for (i, &k) in s.a_k.iter().enumerate() {
        let cfg = ScreeningConfig::with_count(k, s.a_p, s.a_m, s.a_n)?;
        let poisson = reliability::system_risk(&cfg)?;
        let plan = SimPlan::new(cfg, runs, seed.wrapping_add(i as u64), SimMode::BinomialExact)?;
        let mc = simkit::simulate_system(&plan)?;
        let q_binomial = tailcore::binomial_tail(k, s.a_p, s.a_m)?;
        table.push(vec![
            k.into(),
            cfg.lambda().into(),
            s.a_m.into(),
            s.a_n.into(),
            q_binomial.into(),
            poisson.per_person_q.into(),
            mc.analytic.into(),
            poisson.prob_at_least_one.into(),
            poisson.lower_bound.into(),
            poisson.upper_bound.into(),
            mc.estimate.into(),
            mc.std_error.into(),
            mc.abs_error.into(),
            runs.into(),
        ]);
    }
    Ok(table)
}

/// Panel (b): system risk against `log10 n`.
pub fn panel_b(s: &PanelSettings) -> Result<Table> {
    let populations: Vec<f64> = s.b_log10_n.iter().map(|x| 10f64.powf(*x).round()).collect();
    let rows = reliability::population_sweep(s.b_k, s.b_p, s.b_m, &populations)?;
    let mut cols = vec!["log10_n"];
    cols.extend(ScanRow::COLUMNS);
    let mut table = Table::new("panel b: system false-alert probability vs log10 population", &cols);
    for (x, r) in s.b_log10_n.iter().zip(&rows) {
        table.push(vec![
            (*x).into(),
            r.lambda.into(),
            r.n.into(),
            r.m.into(),
            r.q.into(),
            r.prob.into(),
            r.lower.into(),
            r.upper.into(),
            r.log_complement.into(),
        ]);
    }
    Ok(table)
}

/// Panel (c): false-alert probability over time under `k(t) = k0 gamma^t`.
pub fn panel_c(s: &PanelSettings) -> Result<Table> {
    let model = GrowthModel::new(s.c_k0, s.c_gamma, s.c_p)?;
    let rows = lifetime::time_series(&model, s.c_m, s.c_n, &s.c_t)?;
    let t_star = lifetime::critical_time_analytic(&model, s.c_m);
    let mut cols: Vec<&str> = TimeRow::COLUMNS.to_vec();
    cols.push("t_star");
    let mut table = Table::new(
        "panel c: false-alert probability vs time under exponential data growth; t_star is the analytic crossing lambda = m",
        &cols,
    );
    for r in rows {
        table.push(vec![
            r.t.into(),
            r.lambda.into(),
            r.q.into(),
            r.expected_alerts.into(),
            r.prob.into(),
            t_star.into(),
        ]);
    }
    Ok(table)
}

/// Panel (d): two groups with different exposure rates, two rows per `k`.
pub fn panel_d(s: &PanelSettings) -> Result<Table> {
    let profile = CohortProfile::new(vec![
        Cohort { label: "low".into(), n: s.d_n, p: s.d_p[0] },
        Cohort { label: "high".into(), n: s.d_n, p: s.d_p[1] },
    ])?;
    let mut table = Table::new(
        "panel d: per-group false-alert rate and mass vs attribute count; disparity is q_high / q_low",
        &["k", "label", "n", "lambda", "q", "log_q", "mass", "share", "group_prob", "disparity", "dominant"],
    );
    for &k in &s.d_k {
        let risk = cohorts::cohort_system_risk(&profile, k, s.d_m)?;
        let dom = cohorts::dominance_decomposition(&profile, k, s.d_m)?;
        let disparity = cohorts::disparity_ratio(s.d_p[0], s.d_p[1], k, s.d_m)?;
        for g in &risk.groups {
            let (group_prob, _) = reliability::at_least_one(g.q, g.n as f64);
            table.push(vec![
                k.into(),
                g.label.as_str().into(),
                g.n.into(),
                g.lambda.into(),
                g.q.into(),
                g.log_q.into(),
                g.mass.into(),
                g.share.into(),
                group_prob.into(),
                disparity.into(),
                (g.label == dom.dominant_label).into(),
            ]);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelFile {
    pub file: PathBuf,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiguresManifest {
    pub version: String,
    pub runs: u64,
    pub seed: u64,
    pub settings: PanelSettings,
    pub panels: Vec<PanelFile>,
}

/// Writes the four panel datasets and `figures.manifest.json` into `out_dir`.
pub fn figure_panels(out_dir: &Path, runs: u64, seed: u64) -> Result<FiguresManifest> {
    figure_panels_with(out_dir, runs, seed, &PanelSettings::default())
}

pub fn figure_panels_with(
    out_dir: &Path,
    runs: u64,
    seed: u64,
    settings: &PanelSettings,
) -> Result<FiguresManifest> {
    if runs == 0 {
        return Err(Error::domain("runs must be at least 1"));
    }
    let tables = [
        ("panel_a.csv", panel_a(settings, runs, seed)?),
        ("panel_b.csv", panel_b(settings)?),
        ("panel_c.csv", panel_c(settings)?),
        ("panel_d.csv", panel_d(settings)?),
    ];
    let mut panels = Vec::new();
    for (name, table) in &tables {
        let sha256 = write_file(&out_dir.join(name), &table.to_csv())?;
        panels.push(PanelFile { file: PathBuf::from(name), rows: table.rows.len(), sha256 });
    }
    let manifest = FiguresManifest {
        version: crate::VERSION.to_owned(),
        runs,
        seed,
        settings: settings.clone(),
        panels,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    write_file(&out_dir.join("figures.manifest.json"), &json)?;
    Ok(manifest)
}

/// Mean absolute error of the panel (a) Monte Carlo points.
pub fn panel_a_mae(table: &Table) -> f64 {
    let errors = table.floats("mc_abs_error");
    errors.iter().sum::<f64>() / errors.len().max(1) as f64
}

/// First time at which panel (c) probability reaches `level`, by linear
/// interpolation between grid points.
pub fn panel_c_crossing(table: &Table, level: f64) -> Option<f64> {
    let t = table.floats("t");
    let prob = table.floats("prob");
    let i = prob.iter().position(|&p| p >= level)?;
    if i == 0 {
        return Some(t[0]);
    }
    let w = (level - prob[i - 1]) / (prob[i] - prob[i - 1]);
    Some(t[i - 1] + w * (t[i] - t[i - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_have_expected_lengths() {
        let s = PanelSettings::default();
        assert_eq!(s.a_k.len(), 26);
        assert_eq!(s.b_log10_n.len(), 33);
        assert_eq!(s.c_t.len(), 161);
        assert_eq!(*s.c_t.last().unwrap(), 8.0);
        assert_eq!(s.d_k.len(), 40);
    }

    #[test]
    fn panel_c_crosses_near_t_star() {
        let table = panel_c(&PanelSettings::default()).unwrap();
        let crossing = panel_c_crossing(&table, 0.5).unwrap();
        let t_star = 5f64.ln() / 1.5f64.ln();
        assert!((crossing - t_star).abs() < 0.2, "{crossing}");
    }

    #[test]
    fn panel_d_disparity_grows_between_group_thresholds() {
        let table = panel_d(&PanelSettings::default()).unwrap();
        let k = table.floats("k");
        let d = table.floats("disparity");
        let at = |kk: f64| d[k.iter().position(|&x| x == kk).unwrap()];
        assert!(at(350.0) > 10.0);
        assert!(at(100.0) > at(350.0));
    }

    #[test]
    fn small_panel_a_is_well_formed() {
        let s = PanelSettings { a_k: vec![100, 200], ..PanelSettings::default() };
        let table = panel_a(&s, 1, 5).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert!(table.floats("mc_estimate").iter().all(|e| *e == 0.0 || *e == 1.0));
    }
}
