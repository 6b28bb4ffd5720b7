//! Seeded Monte Carlo validation of the analytic quantities.
//!
//! Every trial draws from its own ChaCha8 stream keyed by
//! `(seed, stream, trial)`, so results do not depend on how trials are
//! scheduled across threads. Trial outcomes are integers and are reduced by
//! integer summation, which keeps reports bit-identical under any degree of
//! parallelism.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::cohorts::CohortProfile;
use crate::error::{Error, Result};
use crate::reliability::{at_least_one, ScreeningConfig};
use crate::tailcore;

/// Cap on simulated individuals (`n * runs`) for the individual-level modes.
pub const MAX_INDIVIDUAL_DRAWS: f64 = 1e9;

const STREAM_PER_PERSON: u64 = 1;
const STREAM_SYSTEM: u64 = 2;
const STREAM_PILOT: u64 = 3;
const STREAM_COHORT: u64 = 4;

/// Independent generator for one trial.
pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&stream.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Latent Gaussian correlation structure for the copula sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatentCorrelation {
    /// Equal correlation `rho` between every pair of latent normals.
    Exchangeable { rho: f64 },
    /// Stationary AR(1) latent chain, `corr(Z_i, Z_j) = phi^|i-j|`.
    Ar1 { phi: f64 },
}

impl LatentCorrelation {
    fn validate(&self, k: u64) -> Result<()> {
        match *self {
            LatentCorrelation::Exchangeable { rho } => {
                let floor = if k > 1 { -1.0 / (k as f64 - 1.0) } else { -1.0 };
                if !(rho >= floor && rho <= 1.0) {
                    return Err(Error::domain(format!(
                        "exchangeable correlation {rho} is not positive semidefinite for k={k}"
                    )));
                }
            }
            LatentCorrelation::Ar1 { phi } => {
                if !(phi > -1.0 && phi < 1.0) {
                    return Err(Error::domain(format!("AR(1) coefficient {phi} must lie in (-1, 1)")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Each person's match count is an exact Binomial(k, p) draw.
    BinomialExact,
    /// Each person's match count is a Poisson(kp) draw.
    PoissonApprox,
    /// Matches are Gaussian-copula indicators thresholded at the p-quantile.
    Copula(LatentCorrelation),
    /// System trials drawn as Bernoulli(1 - (1 - q)^n) from the exact tail.
    /// Not an individual-level simulation.
    AnalyticComposite,
}

impl SimMode {
    pub fn label(&self) -> &'static str {
        match self {
            SimMode::BinomialExact => "binomial-exact",
            SimMode::PoissonApprox => "poisson-approx",
            SimMode::Copula(_) => "copula-correlated",
            SimMode::AnalyticComposite => "analytic-composite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimPlan {
    pub config: ScreeningConfig,
    pub runs: u64,
    pub seed: u64,
    pub mode: SimMode,
}

impl SimPlan {
    pub fn new(config: ScreeningConfig, runs: u64, seed: u64, mode: SimMode) -> Result<Self> {
        if runs == 0 {
            return Err(Error::domain("runs must be at least 1"));
        }
        if let SimMode::Copula(corr) = mode {
            corr.validate(config.k())?;
        }
        Ok(Self { config, runs, seed, mode })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimReport {
    pub estimate: f64,
    pub std_error: f64,
    pub runs: u64,
    pub analytic: f64,
    pub abs_error: f64,
    pub z_score: f64,
    pub mode: &'static str,
}

impl SimReport {
    fn new(hits: u64, runs: u64, analytic: f64, mode: &'static str) -> Self {
        let estimate = hits as f64 / runs as f64;
        let std_error = (estimate * (1.0 - estimate) / runs as f64).sqrt();
        let abs_error = (estimate - analytic).abs();
        let z_score = if std_error > 0.0 {
            (estimate - analytic) / std_error
        } else if abs_error == 0.0 {
            0.0
        } else {
            (estimate - analytic).signum() * f64::INFINITY
        };
        Self { estimate, std_error, runs, analytic, abs_error, z_score, mode }
    }

    /// Whether the analytic value lies within `width` standard errors.
    pub fn covers(&self, width: f64) -> bool {
        self.abs_error <= width * self.std_error
    }
}

/// Draws the match count of one person.
struct PersonSampler {
    k: u64,
    kind: SamplerKind,
}

enum SamplerKind {
    Binomial(Binomial),
    Poisson(Poisson<f64>),
    Zero,
    Copula { corr: LatentCorrelation, cutoff: f64 },
}

impl PersonSampler {
    fn new(config: &ScreeningConfig, mode: SimMode) -> Result<Self> {
        let (k, p) = (config.k(), config.p());
        let kind = match mode {
            SimMode::BinomialExact | SimMode::AnalyticComposite => SamplerKind::Binomial(
                Binomial::new(k, p).map_err(|e| Error::domain(format!("binomial sampler: {e}")))?,
            ),
            SimMode::PoissonApprox => SamplerKind::Poisson(
                Poisson::new(config.lambda())
                    .map_err(|e| Error::domain(format!("poisson sampler: {e}")))?,
            ),
            SimMode::Copula(corr) => {
                corr.validate(k)?;
                SamplerKind::Copula { corr, cutoff: normal_quantile(p) }
            }
        };
        Ok(Self { k, kind })
    }

    fn independent(k: u64, p: f64) -> Result<Self> {
        if p == 0.0 {
            return Ok(Self { k, kind: SamplerKind::Zero });
        }
        Ok(Self {
            k,
            kind: SamplerKind::Binomial(
                Binomial::new(k, p).map_err(|e| Error::domain(format!("binomial sampler: {e}")))?,
            ),
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.kind {
            SamplerKind::Binomial(b) => b.sample(rng),
            SamplerKind::Poisson(d) => d.sample(rng) as u64,
            SamplerKind::Zero => 0,
            SamplerKind::Copula { corr, cutoff } => copula_count(rng, self.k, *corr, *cutoff),
        }
    }
}

fn normal_quantile(p: f64) -> f64 {
    let std = Normal::standard();
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        std.inverse_cdf(p)
    }
}

/// Number of latent normals below `cutoff` in one correlated draw.
fn copula_count<R: Rng + ?Sized>(rng: &mut R, k: u64, corr: LatentCorrelation, cutoff: f64) -> u64 {
    let mut count = 0;
    match corr {
        LatentCorrelation::Exchangeable { rho } => {
            // Z_i = a (e_i - mean e) + b mean e reproduces unit variance and
            // pairwise correlation rho for every rho >= -1/(k-1).
            let kf = k as f64;
            let a = (1.0 - rho).max(0.0).sqrt();
            let b = (1.0 + (kf - 1.0) * rho).max(0.0).sqrt();
            let eps: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            let mean = eps.iter().sum::<f64>() / kf;
            for e in eps {
                if a * (e - mean) + b * mean < cutoff {
                    count += 1;
                }
            }
        }
        LatentCorrelation::Ar1 { phi } => {
            let innov = (1.0 - phi * phi).sqrt();
            let mut z: f64 = rng.sample(StandardNormal);
            for i in 0..k {
                if i > 0 {
                    let e: f64 = rng.sample(StandardNormal);
                    z = phi * z + innov * e;
                }
                if z < cutoff {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Analytic per-person tail for the mode (independent binomial for copula).
fn per_person_analytic(config: &ScreeningConfig, mode: SimMode) -> Result<f64> {
    match mode {
        SimMode::PoissonApprox => tailcore::poisson_tail(config.lambda(), config.m()),
        _ => tailcore::binomial_tail(config.k(), config.p(), config.m().min(config.k() + 1)),
    }
}

/// Fraction of trials in which one person reaches the threshold.
pub fn simulate_per_person(plan: &SimPlan) -> Result<SimReport> {
    let sampler = PersonSampler::new(&plan.config, plan.mode)?;
    let m = plan.config.m();
    let analytic = per_person_analytic(&plan.config, plan.mode)?;
    let seed = plan.seed;
    let hits: u64 = (0..plan.runs)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, STREAM_PER_PERSON, t);
            u64::from(sampler.draw(&mut rng) >= m)
        })
        .sum();
    Ok(SimReport::new(hits, plan.runs, analytic, plan.mode.label()))
}

/// Per-person tail for `Binomial(k, p) >= m` with `p` allowed to be 0.
pub fn simulate_bernoulli_tail(k: u64, p: f64, m: u64, runs: u64, seed: u64) -> Result<SimReport> {
    tailcore::check_probability("p", p)?;
    if runs == 0 {
        return Err(Error::domain("runs must be at least 1"));
    }
    let sampler = PersonSampler::independent(k, p)?;
    let analytic = tailcore::binomial_tail(k, p, m.min(k + 1))?;
    let hits: u64 = (0..runs)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, STREAM_PER_PERSON, t);
            u64::from(sampler.draw(&mut rng) >= m)
        })
        .sum();
    Ok(SimReport::new(hits, runs, analytic, SimMode::BinomialExact.label()))
}

fn check_budget(n: u64, runs: u64) -> Result<()> {
    let requested = n as f64 * runs as f64;
    if requested > MAX_INDIVIDUAL_DRAWS {
        return Err(Error::Budget { requested, cap: MAX_INDIVIDUAL_DRAWS });
    }
    Ok(())
}

/// Fraction of trials in which at least one of `n` simulated innocents alerts.
///
/// Individual-level modes stop a trial at the first alert; the draw budget
/// still counts the full `n * runs`.
pub fn simulate_system(plan: &SimPlan) -> Result<SimReport> {
    let cfg = &plan.config;
    let n = cfg.n();
    let m = cfg.m();
    let q = per_person_analytic(cfg, plan.mode)?;
    let (analytic, _) = at_least_one(q, n as f64);
    let seed = plan.seed;

    if let SimMode::AnalyticComposite = plan.mode {
        let hits: u64 = (0..plan.runs)
            .into_par_iter()
            .map(|t| {
                let mut rng = trial_rng(seed, STREAM_SYSTEM, t);
                u64::from(rng.random::<f64>() < analytic)
            })
            .sum();
        return Ok(SimReport::new(hits, plan.runs, analytic, plan.mode.label()));
    }

    check_budget(n, plan.runs)?;
    let sampler = PersonSampler::new(cfg, plan.mode)?;
    let hits: u64 = (0..plan.runs)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, STREAM_SYSTEM, t);
            u64::from((0..n).any(|_| sampler.draw(&mut rng) >= m))
        })
        .sum();
    Ok(SimReport::new(hits, plan.runs, analytic, plan.mode.label()))
}

/// System trials for a heterogeneous population at common `(k, m)`, with
/// exact binomial per-person draws. The analytic value uses binomial tails.
pub fn simulate_cohort_system(
    profile: &CohortProfile,
    k: u64,
    m: u64,
    runs: u64,
    seed: u64,
) -> Result<SimReport> {
    if runs == 0 {
        return Err(Error::domain("runs must be at least 1"));
    }
    let total: u64 = profile.groups().iter().map(|g| g.n).sum();
    check_budget(total, runs)?;
    let mut samplers = Vec::new();
    let mut log_none = 0.0;
    for g in profile.groups() {
        let q = tailcore::binomial_tail(k, g.p, m.min(k + 1))?;
        log_none += g.n as f64 * (-q).ln_1p();
        samplers.push((g.n, PersonSampler::independent(k, g.p)?));
    }
    let analytic = -f64::exp_m1(log_none);
    let hits: u64 = (0..runs)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, STREAM_COHORT, t);
            let hit = samplers
                .iter()
                .any(|(n, s)| (0..*n).any(|_| s.draw(&mut rng) >= m));
            u64::from(hit)
        })
        .sum();
    Ok(SimReport::new(hits, runs, analytic, SimMode::BinomialExact.label()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatedReport {
    /// Tail estimate; `analytic` is the independent binomial tail.
    pub tail: SimReport,
    pub mean: f64,
    /// Sample variance of the indicator sum `Y`.
    pub variance: f64,
    /// `k p (1 - p)`.
    pub independent_variance: f64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Moments {
    hits: u64,
    sum: u64,
    sum_sq: u128,
}

impl Moments {
    fn merge(self, o: Moments) -> Moments {
        Moments { hits: self.hits + o.hits, sum: self.sum + o.sum, sum_sq: self.sum_sq + o.sum_sq }
    }
}

fn copula_moments(k: u64, p: f64, corr: LatentCorrelation, m: u64, runs: u64, seed: u64, stream: u64) -> Moments {
    let cutoff = normal_quantile(p);
    (0..runs)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, stream, t);
            let y = copula_count(&mut rng, k, corr, cutoff);
            Moments { hits: u64::from(y >= m), sum: y, sum_sq: (y as u128) * (y as u128) }
        })
        .reduce(Moments::default, Moments::merge)
}

/// Correlated per-person draws: tail estimate plus empirical `Var(Y)`.
pub fn simulate_correlated(plan: &SimPlan) -> Result<CorrelatedReport> {
    let SimMode::Copula(corr) = plan.mode else {
        return Err(Error::domain("simulate_correlated needs a copula-mode plan"));
    };
    let cfg = &plan.config;
    corr.validate(cfg.k())?;
    let mo = copula_moments(cfg.k(), cfg.p(), corr, cfg.m(), plan.runs, plan.seed, STREAM_PER_PERSON);
    let r = plan.runs as f64;
    let mean = mo.sum as f64 / r;
    let variance = if plan.runs > 1 {
        (mo.sum_sq as f64 - r * mean * mean) / (r - 1.0)
    } else {
        0.0
    };
    let analytic = per_person_analytic(cfg, plan.mode)?;
    Ok(CorrelatedReport {
        tail: SimReport::new(mo.hits, plan.runs, analytic, plan.mode.label()),
        mean,
        variance,
        independent_variance: cfg.k() as f64 * cfg.p() * (1.0 - cfg.p()),
    })
}

/// Average pairwise correlation of the binary indicators, measured from a
/// pilot of `runs` copula draws on a stream separate from the main runs.
pub fn measure_binary_correlation(
    k: u64,
    p: f64,
    corr: LatentCorrelation,
    runs: u64,
    seed: u64,
) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain("pairwise correlation needs k >= 2"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("p must lie in (0, 1), got {p}")));
    }
    corr.validate(k)?;
    let mo = copula_moments(k, p, corr, u64::MAX, runs, seed, STREAM_PILOT);
    let (kf, r) = (k as f64, runs as f64);
    let p_hat = mo.sum as f64 / (kf * r);
    // sum_{i != j} X_i X_j = Y^2 - Y for binary X
    let pair_mean = (mo.sum_sq as f64 - mo.sum as f64) / r / (kf * (kf - 1.0));
    Ok((pair_mean - p_hat * p_hat) / (p_hat * (1.0 - p_hat)))
}

/// Latent exchangeable correlation whose binary indicators have average
/// pairwise correlation `target`, found by bisection on pilot measurements
/// with common random numbers.
pub fn calibrate_latent_rho(target: f64, k: u64, p: f64, runs: u64, seed: u64) -> Result<f64> {
    if !(0.0..1.0).contains(&target) {
        return Err(Error::domain(format!("target binary correlation {target} outside [0, 1)")));
    }
    let measure = |rho: f64| measure_binary_correlation(k, p, LatentCorrelation::Exchangeable { rho }, runs, seed);
    let (mut lo, mut hi) = (0.0, 0.999);
    if measure(hi)? < target {
        return Err(Error::Range(format!("binary correlation {target} unreachable at p={p}")));
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if measure(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-4 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
