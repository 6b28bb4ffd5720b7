//! Scenario files: one TOML document naming a kind, its parameters and an
//! output target.
//!
//! ```toml
//! name = "intro"
//! kind = "tail"
//!
//! [parameters]
//! lambda = 5.0
//! m = 15
//!
//! [output]
//! path = "out/intro.csv"
//! format = "csv"
//! ```
//!
//! Parameters are checked against the kind's schema before anything runs;
//! unknown or misspelled keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::table::{write_file, Cell, Format, Table};
use crate::cohorts::{self, Cohort, CohortProfile, GroupRow};
use crate::effdim::{self, CorrelationAdjusted, SpatialCorrelation, TemporalCorrelation};
use crate::error::{Error, Result};
use crate::lifetime::{self, GrowthModel, DEFAULT_CRITERION_LEVEL};
use crate::posterior::{self, BayesContext};
use crate::reliability::{self, ScanRow, ScreeningConfig, Threshold};
use crate::simkit::{self, LatentCorrelation, SimMode, SimPlan};
use crate::tailcore;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Tail,
    System,
    Phase,
    Lifetime,
    Cohort,
    Bayes,
    Effdim,
    Simulate,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Tail,
        Kind::System,
        Kind::Phase,
        Kind::Lifetime,
        Kind::Cohort,
        Kind::Bayes,
        Kind::Effdim,
        Kind::Simulate,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Tail => "tail",
            Kind::System => "system",
            Kind::Phase => "phase",
            Kind::Lifetime => "lifetime",
            Kind::Cohort => "cohort",
            Kind::Bayes => "bayes",
            Kind::Effdim => "effdim",
            Kind::Simulate => "simulate",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s || (s == "phase-scan" && *k == Kind::Phase))
            .ok_or_else(|| Error::Schema(format!("unknown scenario kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    #[serde(default)]
    pub parameters: toml::Table,
    pub output: Option<OutputSpec>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Schema(one_line(&e.to_string())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// An inline scenario with no parameters and no output file.
    pub fn inline(kind: Kind) -> Self {
        Self { name: kind.as_str().to_owned(), kind, parameters: toml::Table::new(), output: None }
    }

    /// Sets one parameter from a `key=value` assignment; the value uses TOML
    /// syntax (`lambda=5.0`, `lambdas=[25, 100]`, `target="system"`), and a
    /// bare word is taken as a string.
    pub fn set_param(&mut self, assignment: &str) -> Result<()> {
        let (key, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Schema(format!("parameter {assignment:?} is not key=value")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Schema(format!("parameter {assignment:?} has an empty key")));
        }
        let value = parse_value(raw.trim())?;
        self.parameters.insert(key.to_owned(), value);
        Ok(())
    }

    pub fn set_value(&mut self, key: &str, value: impl Into<toml::Value>) {
        self.parameters.insert(key.to_owned(), value.into());
    }
}

fn parse_value(raw: &str) -> Result<toml::Value> {
    let doc: std::result::Result<toml::Table, _> = format!("v = {raw}").parse();
    match doc {
        Ok(mut t) => Ok(t.remove("v").expect("key present")),
        Err(_) if !raw.is_empty() && raw.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') => {
            Ok(toml::Value::String(raw.to_owned()))
        }
        Err(e) => Err(Error::Schema(format!("cannot parse value {raw:?}: {}", one_line(&e.to_string())))),
    }
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Record written next to every scenario output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub kind: Kind,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub output: PathBuf,
    pub format: Format,
    pub sha256: String,
}

impl RunManifest {
    /// Manifest path for an output file: `<output>.manifest.json`.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut s = output.as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }
}

// Parameter schemas, one per kind.

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailParams {
    pub lambda: f64,
    pub m: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    pub k: u64,
    pub p: f64,
    pub m: Option<u64>,
    pub c: Option<f64>,
    pub n: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseParams {
    pub lambdas: Vec<f64>,
    pub c: f64,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifetimeParams {
    pub k0: f64,
    pub gamma: f64,
    pub p: f64,
    pub m: u64,
    pub n: Option<u64>,
    pub criterion_level: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupParams {
    pub label: String,
    pub n: u64,
    pub p: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortParams {
    pub k: u64,
    pub m: u64,
    pub groups: Vec<GroupParams>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BayesParams {
    pub r: f64,
    pub s: f64,
    pub alpha: f64,
    pub q: f64,
    pub n: Option<u64>,
    pub n_values: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffdimParams {
    pub k: u64,
    pub p: f64,
    pub c: f64,
    pub k_eff: Option<f64>,
    pub area: Option<f64>,
    pub xi: Option<f64>,
    pub tau: Option<f64>,
    pub rho: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimTarget {
    PerPerson,
    System,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    BinomialExact,
    PoissonApprox,
    CopulaCorrelated,
    AnalyticComposite,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    pub k: u64,
    pub p: f64,
    pub m: u64,
    #[serde(default = "one")]
    pub n: u64,
    pub runs: u64,
    pub seed: u64,
    pub target: SimTarget,
    pub mode: ModeName,
    pub rho: Option<f64>,
    pub phi: Option<f64>,
}

fn one() -> u64 {
    1
}

fn parse<T: DeserializeOwned>(kind: Kind, params: &toml::Table) -> Result<T> {
    toml::Value::Table(params.clone())
        .try_into()
        .map_err(|e: toml::de::Error| Error::Schema(format!("{kind} parameters: {}", one_line(&e.to_string()))))
}

/// Parameters validated against their kind's schema.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Resolved {
    Tail(TailParams),
    System(SystemParams),
    Phase(PhaseParams),
    Lifetime(LifetimeParams),
    Cohort(CohortParams),
    Bayes(BayesParams),
    Effdim(EffdimParams),
    Simulate(SimulateParams),
}

impl Resolved {
    fn seed(&self) -> Option<u64> {
        match self {
            Resolved::Simulate(s) => Some(s.seed),
            _ => None,
        }
    }
}

/// Checks parameters against the schema of `kind`.
pub fn validate(kind: Kind, params: &toml::Table) -> Result<Resolved> {
    let resolved = match kind {
        Kind::Tail => Resolved::Tail(parse(kind, params)?),
        Kind::System => {
            let p: SystemParams = parse(kind, params)?;
            if p.m.is_some() == p.c.is_some() {
                return Err(Error::Schema("system parameters need exactly one of m or c".into()));
            }
            Resolved::System(p)
        }
        Kind::Phase => Resolved::Phase(parse(kind, params)?),
        Kind::Lifetime => {
            let mut p: LifetimeParams = parse(kind, params)?;
            p.criterion_level.get_or_insert(DEFAULT_CRITERION_LEVEL);
            Resolved::Lifetime(p)
        }
        Kind::Cohort => Resolved::Cohort(parse(kind, params)?),
        Kind::Bayes => {
            let p: BayesParams = parse(kind, params)?;
            if p.n.is_none() && p.n_values.is_none() {
                return Err(Error::Schema("bayes parameters need n or n_values".into()));
            }
            Resolved::Bayes(p)
        }
        Kind::Effdim => {
            let p: EffdimParams = parse(kind, params)?;
            let routes = [
                p.k_eff.is_some(),
                p.area.is_some() || p.xi.is_some(),
                p.tau.is_some(),
                p.rho.is_some(),
            ];
            if routes.iter().filter(|&&r| r).count() != 1 {
                return Err(Error::Schema(
                    "effdim parameters need exactly one of k_eff, area+xi, tau, rho".into(),
                ));
            }
            if p.area.is_some() != p.xi.is_some() {
                return Err(Error::Schema("effdim spatial route needs both area and xi".into()));
            }
            Resolved::Effdim(p)
        }
        Kind::Simulate => {
            let p: SimulateParams = parse(kind, params)?;
            if p.mode == ModeName::CopulaCorrelated && p.rho.is_some() == p.phi.is_some() {
                return Err(Error::Schema("copula mode needs exactly one of rho or phi".into()));
            }
            if p.mode != ModeName::CopulaCorrelated && (p.rho.is_some() || p.phi.is_some()) {
                return Err(Error::Schema("rho/phi only apply to copula-correlated mode".into()));
            }
            Resolved::Simulate(p)
        }
    };
    Ok(resolved)
}

fn scan_cells(r: &ScanRow) -> Vec<Cell> {
    vec![
        r.lambda.into(),
        r.n.into(),
        r.m.into(),
        r.q.into(),
        r.prob.into(),
        r.lower.into(),
        r.upper.into(),
        r.log_complement.into(),
    ]
}

pub(crate) fn group_cells(g: &GroupRow) -> Vec<Cell> {
    vec![
        g.label.as_str().into(),
        g.n.into(),
        g.lambda.into(),
        g.q.into(),
        g.log_q.into(),
        g.mass.into(),
        g.share.into(),
    ]
}

fn adjusted_cells(k: u64, a: &CorrelationAdjusted) -> Vec<Cell> {
    vec![
        k.into(),
        a.k_eff.into(),
        a.reduction_factor.into(),
        a.unadjusted_exponent.into(),
        a.adjusted_exponent.into(),
        a.unadjusted_n_crit.into(),
        a.adjusted_n_crit.into(),
    ]
}

/// Evaluates validated parameters into an output table.
pub fn evaluate(resolved: &Resolved) -> Result<Table> {
    match resolved {
        Resolved::Tail(p) => {
            let t = tailcore::tail_estimate(p.lambda, p.m)?;
            let mut table = Table::new(
                "Poisson tail q = Pr(Y >= m) with Chernoff upper and Robbins lower bounds at c = m/lambda",
                &["lambda", "m", "q", "log_q", "chernoff_upper", "robbins_lower", "exponent"],
            );
            table.push(vec![
                p.lambda.into(),
                p.m.into(),
                t.exact.into(),
                t.log_exact.into(),
                t.chernoff_upper.into(),
                t.robbins_lower.into(),
                t.exponent.into(),
            ]);
            Ok(table)
        }
        Resolved::System(p) => {
            let threshold = match (p.m, p.c) {
                (Some(m), _) => Threshold::Count(m),
                (None, Some(c)) => Threshold::Ratio(c),
                (None, None) => unreachable!("validated"),
            };
            let cfg = ScreeningConfig::new(p.k, p.p, threshold, p.n)?;
            let r = reliability::system_risk(&cfg)?;
            let mut table = Table::new(
                "system false-alert probability 1-(1-q)^n with two-sided bounds",
                &["lambda", "n", "m", "q", "expected_false_alerts", "prob", "lower", "upper", "log_complement"],
            );
            table.push(vec![
                cfg.lambda().into(),
                cfg.n().into(),
                cfg.m().into(),
                r.per_person_q.into(),
                r.expected_false_alerts.into(),
                r.prob_at_least_one.into(),
                r.lower_bound.into(),
                r.upper_bound.into(),
                r.log_complement.into(),
            ]);
            Ok(table)
        }
        Resolved::Phase(p) => {
            let mut cols = vec!["alpha"];
            cols.extend(ScanRow::COLUMNS);
            let mut table = Table::new(
                "phase scan: n = round(sqrt(lambda) exp(alpha lambda D(c))), m = ceil(c lambda)",
                &cols,
            );
            for &alpha in &p.alphas {
                for row in reliability::phase_scan(&p.lambdas, p.c, alpha)? {
                    let mut cells = vec![alpha.into()];
                    cells.extend(scan_cells(&row));
                    table.push(cells);
                }
            }
            Ok(table)
        }
        Resolved::Lifetime(p) => {
            let model = GrowthModel::new(p.k0, p.gamma, p.p)?;
            let level = p.criterion_level.unwrap_or(DEFAULT_CRITERION_LEVEL);
            let mut table = Table::new(
                "system lifetime: analytic T* where lambda(t) = m; corrected time solves n q(t) = criterion level",
                &[
                    "k0",
                    "gamma",
                    "p",
                    "m",
                    "n",
                    "t_star_analytic",
                    "t_star_corrected",
                    "lambda_at_failure",
                    "correction_magnitude",
                    "closed_form_lambda",
                    "criterion_level",
                ],
            );
            let analytic = lifetime::critical_time_analytic(&model, p.m);
            let mut cells: Vec<Cell> =
                vec![p.k0.into(), p.gamma.into(), p.p.into(), p.m.into()];
            match p.n {
                Some(n) => {
                    let r = lifetime::critical_time_at_level(&model, p.m, n, level)?;
                    cells.extend([
                        n.into(),
                        r.t_star_analytic.into(),
                        r.t_star_corrected.into(),
                        r.lambda_at_failure.into(),
                        r.correction_magnitude.into(),
                        r.closed_form_lambda.into(),
                        level.into(),
                    ]);
                }
                None => cells.extend([
                    Cell::Empty,
                    analytic.into(),
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    Cell::Empty,
                    level.into(),
                ]),
            }
            table.push(cells);
            Ok(table)
        }
        Resolved::Cohort(p) => {
            let profile = CohortProfile::new(
                p.groups
                    .iter()
                    .map(|g| Cohort { label: g.label.clone(), n: g.n, p: g.p })
                    .collect(),
            )?;
            let risk = cohorts::cohort_system_risk(&profile, p.k, p.m)?;
            let dom = cohorts::dominance_decomposition(&profile, p.k, p.m)?;
            let mut cols: Vec<&str> = GroupRow::COLUMNS.to_vec();
            cols.extend(["dominant", "system_exact", "system_exponential", "main_term", "correction_bound"]);
            let mut table = Table::new(
                "per-group false-alert mass n_g q_g with system risk and dominance decomposition",
                &cols,
            );
            for g in &risk.groups {
                let mut cells = group_cells(g);
                cells.extend([
                    (g.label == dom.dominant_label).into(),
                    risk.exact.into(),
                    risk.exponential_approx.into(),
                    dom.main_term.into(),
                    dom.correction_bound.into(),
                ]);
                table.push(cells);
            }
            Ok(table)
        }
        Resolved::Bayes(p) => {
            let ns: Vec<u64> = match (&p.n_values, p.n) {
                (Some(v), _) => v.clone(),
                (None, Some(n)) => vec![n],
                (None, None) => unreachable!("validated"),
            };
            let n_crit = posterior::bayes_critical_population(p.r, p.s, p.alpha, p.q)?;
            let mut table = Table::new(
                "posterior actionability: exact and sparse PPV, regime at nq/rs decades",
                &[
                    "n",
                    "nq",
                    "rs",
                    "ppv_exact",
                    "ppv_sparse",
                    "fdr",
                    "regime",
                    "frequentist_reliable",
                    "bayes_n_crit",
                ],
            );
            for n in ns {
                let ctx = BayesContext::new(p.r, p.s, p.alpha, p.q, n)?;
                let ppv = posterior::ppv(&ctx)?;
                let v = posterior::classify_regime(&ctx);
                table.push(vec![
                    n.into(),
                    v.nq.into(),
                    v.rs.into(),
                    ppv.ppv.into(),
                    ppv.sparse_ppv.into(),
                    ppv.fdr.into(),
                    v.regime.as_str().into(),
                    v.frequentist_reliable.into(),
                    n_crit.into(),
                ]);
            }
            Ok(table)
        }
        Resolved::Effdim(p) => {
            let k_eff = if let Some(k_eff) = p.k_eff {
                k_eff
            } else if let (Some(area), Some(xi)) = (p.area, p.xi) {
                effdim::k_eff_spatial(&SpatialCorrelation::new(area, xi)?)
            } else if let Some(tau) = p.tau {
                effdim::k_eff_temporal(&TemporalCorrelation::exponential(p.k, tau)?).k_eff
            } else if let Some(rho) = &p.rho {
                effdim::k_eff_temporal(&TemporalCorrelation::explicit(rho.clone())?).k_eff
            } else {
                unreachable!("validated")
            };
            let nonneg = p.rho.as_ref().is_none_or(|r| r.iter().all(|&x| x >= 0.0));
            let adj = effdim::adjusted_limits(p.k, p.p, p.c, k_eff, nonneg)?;
            let mut table = Table::new(
                "heuristic correlation adjustment: exponent (k_eff/k) lambda D(c) and sqrt(lambda) exp(exponent)",
                &CorrelationAdjusted::COLUMNS,
            );
            table.push(adjusted_cells(p.k, &adj));
            Ok(table)
        }
        Resolved::Simulate(p) => {
            let cfg = ScreeningConfig::with_count(p.k, p.p, p.m, p.n)?;
            let mode = match p.mode {
                ModeName::BinomialExact => SimMode::BinomialExact,
                ModeName::PoissonApprox => SimMode::PoissonApprox,
                ModeName::AnalyticComposite => SimMode::AnalyticComposite,
                ModeName::CopulaCorrelated => SimMode::Copula(match (p.rho, p.phi) {
                    (Some(rho), None) => LatentCorrelation::Exchangeable { rho },
                    (None, Some(phi)) => LatentCorrelation::Ar1 { phi },
                    _ => unreachable!("validated"),
                }),
            };
            let plan = SimPlan::new(cfg, p.runs, p.seed, mode)?;
            let report = match p.target {
                SimTarget::PerPerson => simkit::simulate_per_person(&plan)?,
                SimTarget::System => simkit::simulate_system(&plan)?,
            };
            let mut table = Table::new(
                "Monte Carlo validation against the analytic value",
                &["target", "mode", "k", "p", "m", "n", "runs", "seed", "analytic", "estimate", "std_error", "abs_error", "z"],
            );
            table.push(vec![
                match p.target {
                    SimTarget::PerPerson => "per-person",
                    SimTarget::System => "system",
                }
                .into(),
                report.mode.into(),
                p.k.into(),
                p.p.into(),
                p.m.into(),
                p.n.into(),
                p.runs.into(),
                p.seed.into(),
                report.analytic.into(),
                report.estimate.into(),
                report.std_error.into(),
                report.abs_error.into(),
                report.z_score.into(),
            ]);
            Ok(table)
        }
    }
}

/// Validates, evaluates and writes a scenario plus its manifest.
///
/// Nothing is written unless validation and evaluation both succeed.
pub fn run_scenario(s: &Scenario) -> Result<RunManifest> {
    let output = s
        .output
        .as_ref()
        .ok_or_else(|| Error::Schema(format!("scenario {:?} has no [output] section", s.name)))?;
    let (table, resolved) = prepare(s)?;
    let bytes = table.encode(output.format);
    let sha256 = write_file(&output.path, &bytes)?;
    let manifest = RunManifest {
        scenario: s.name.clone(),
        kind: s.kind,
        parameters: serde_json::to_value(&resolved).expect("parameters serialize"),
        seed: resolved.seed(),
        version: crate::VERSION.to_owned(),
        output: output.path.clone(),
        format: output.format,
        sha256,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    write_file(&RunManifest::path_for(&output.path), &json)?;
    Ok(manifest)
}

/// Validates and evaluates without writing anything.
pub fn prepare(s: &Scenario) -> Result<(Table, Resolved)> {
    let resolved = validate(s.kind, &s.parameters)?;
    let table = evaluate(&resolved)?;
    Ok((table, resolved))
}
