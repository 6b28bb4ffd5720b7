use screen_limits::effdim::{design_effect, sum_variance};
use screen_limits::simkit::{
    calibrate_latent_rho, measure_binary_correlation, simulate_bernoulli_tail, simulate_correlated,
    simulate_per_person, simulate_system, LatentCorrelation, SimMode, SimPlan, SimReport,
};
use screen_limits::{reliability, Error, ScreeningConfig};

fn plan(k: u64, p: f64, m: u64, n: u64, runs: u64, seed: u64, mode: SimMode) -> SimPlan {
    SimPlan::new(config(k, p, m, n), runs, seed, mode).unwrap()
}

fn config(k: u64, p: f64, m: u64, n: u64) -> ScreeningConfig {
    ScreeningConfig::with_count(k, p, m, n).unwrap()
}

fn combined_se(a: &SimReport, b: &SimReport) -> f64 {
    (a.std_error.powi(2) + b.std_error.powi(2)).sqrt()
}

#[test]
fn intro_tail_by_simulation() {
    let r = simulate_per_person(&plan(1000, 0.005, 15, 1, 1_000_000, 11, SimMode::BinomialExact)).unwrap();
    assert!((r.estimate - 2.26e-4).abs() <= 3.0 * r.std_error, "{r:?}");
}

#[test]
fn small_binomial_by_simulation() {
    let r = simulate_per_person(&plan(20, 0.3, 5, 1, 100_000, 12, SimMode::BinomialExact)).unwrap();
    assert!(r.covers(3.0), "{r:?}");
    let zero = simulate_bernoulli_tail(20, 0.0, 1, 1000, 3).unwrap();
    assert_eq!(zero.estimate, 0.0);
}

#[test]
fn system_example_by_simulation() {
    let cfg = config(100, 0.01, 5, 10_000);
    let r = simulate_system(&SimPlan::new(cfg, 5000, 13, SimMode::BinomialExact).unwrap()).unwrap();
    let exact = reliability::system_risk(&cfg).unwrap();
    assert!(r.covers(3.0) || r.abs_error < 1e-12, "{r:?}");
    // Poisson system value agrees with the binomial one to the Le Cam scale
    assert!((exact.prob_at_least_one - r.analytic).abs() < 0.01);
}

#[test]
fn single_person_system_matches_per_person() {
    let sys = simulate_system(&plan(50, 0.04, 4, 1, 200_000, 14, SimMode::BinomialExact)).unwrap();
    let per = simulate_per_person(&plan(50, 0.04, 4, 1, 200_000, 15, SimMode::BinomialExact)).unwrap();
    assert_eq!(sys.analytic, per.analytic);
    assert!((sys.estimate - per.estimate).abs() <= 3.0 * combined_se(&sys, &per));
}

#[test]
fn calibration_over_100_seeds() {
    let covered = (0..100u64)
        .filter(|&seed| {
            simulate_per_person(&plan(100, 0.01, 3, 1, 2000, 1000 + seed, SimMode::BinomialExact))
                .unwrap()
                .covers(3.0)
        })
        .count();
    assert!(covered >= 95, "{covered}/100");
    let poisson = (0..100u64)
        .filter(|&seed| {
            simulate_per_person(&plan(100, 0.01, 3, 1, 2000, 5000 + seed, SimMode::PoissonApprox))
                .unwrap()
                .covers(3.0)
        })
        .count();
    assert!(poisson >= 95, "{poisson}/100");
}

#[test]
fn error_shrinks_as_inverse_square_root() {
    let levels = [1_000u64, 10_000, 100_000, 1_000_000];
    let seeds = 16u64;
    let points: Vec<(f64, f64)> = levels
        .iter()
        .map(|&runs| {
            let mean_err = (0..seeds)
                .map(|s| {
                    simulate_per_person(&plan(20, 0.3, 5, 1, runs, 77 + s * 1000 + runs, SimMode::BinomialExact))
                        .unwrap()
                        .abs_error
                })
                .sum::<f64>()
                / seeds as f64;
            ((runs as f64).ln(), mean_err.ln())
        })
        .collect();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let slope = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() <= 0.15, "slope {slope}");
}

#[test]
fn identical_across_thread_counts() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let a = simulate_system(&plan(200, 0.01, 7, 1000, 3000, 99, SimMode::BinomialExact)).unwrap();
            let b = simulate_per_person(&plan(
                30,
                0.1,
                6,
                1,
                20_000,
                98,
                SimMode::Copula(LatentCorrelation::Ar1 { phi: 0.6 }),
            ))
            .unwrap();
            let c = simulate_correlated(&plan(
                30,
                0.1,
                6,
                1,
                20_000,
                97,
                SimMode::Copula(LatentCorrelation::Exchangeable { rho: 0.3 }),
            ))
            .unwrap();
            (a, b, c)
        })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(7));
}

#[test]
fn copula_variance_matches_design_effect() {
    let (k, p) = (10u64, 0.2);
    let rho_latent = calibrate_latent_rho(0.1, k, p, 100_000, 21).unwrap();
    let corr = LatentCorrelation::Exchangeable { rho: rho_latent };
    let rho_binary = measure_binary_correlation(k, p, corr, 100_000, 22).unwrap();
    assert!((rho_binary - 0.1).abs() < 0.02, "{rho_binary}");
    // every row of the exchangeable matrix sums to (k - 1) rho off the diagonal
    let deff = design_effect(&vec![(k - 1) as f64 * rho_binary; k as usize], k).unwrap();
    let predicted = sum_variance(k, p, deff);
    let r = simulate_correlated(&plan(k, p, 4, 1, 100_000, 23, SimMode::Copula(corr))).unwrap();
    assert!((r.variance / predicted - 1.0).abs() < 0.10, "{} vs {predicted}", r.variance);
    assert!(r.variance > r.independent_variance);
}

#[test]
fn zero_correlation_copula_is_independent() {
    let copula = simulate_per_person(&plan(
        40,
        0.1,
        7,
        1,
        100_000,
        31,
        SimMode::Copula(LatentCorrelation::Exchangeable { rho: 0.0 }),
    ))
    .unwrap();
    let indep = simulate_per_person(&plan(40, 0.1, 7, 1, 100_000, 32, SimMode::BinomialExact)).unwrap();
    assert!((copula.estimate - indep.estimate).abs() <= 3.0 * combined_se(&copula, &indep));
    assert!(copula.covers(3.0));
}

#[test]
fn positive_correlation_inflates_tail() {
    let (k, p, m) = (50u64, 0.05, 6u64);
    let base = simulate_per_person(&plan(
        k,
        p,
        m,
        1,
        50_000,
        41,
        SimMode::Copula(LatentCorrelation::Exchangeable { rho: 0.0 }),
    ))
    .unwrap();
    for (i, rho) in [0.05, 0.1, 0.2, 0.3, 0.5].into_iter().enumerate() {
        let r = simulate_per_person(&plan(
            k,
            p,
            m,
            1,
            50_000,
            42 + i as u64,
            SimMode::Copula(LatentCorrelation::Exchangeable { rho }),
        ))
        .unwrap();
        assert!(r.estimate >= base.estimate - 3.0 * combined_se(&r, &base), "rho={rho}: {r:?} {base:?}");
    }
}

#[test]
fn budget_error_names_the_cap() {
    let err = simulate_system(&plan(10, 0.1, 3, 10_000_000, 1000, 1, SimMode::BinomialExact)).unwrap_err();
    assert!(matches!(err, Error::Budget { .. }));
    assert_eq!(err.exit_code(), 4);
    // the composite mode is exempt from the individual-draw cap
    let composite = simulate_system(&plan(10, 0.1, 3, 10_000_000, 1000, 1, SimMode::AnalyticComposite)).unwrap();
    assert_eq!(composite.mode, "analytic-composite");
}
