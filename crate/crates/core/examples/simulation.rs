use screen_limits::simkit::{simulate_correlated, simulate_per_person, LatentCorrelation, SimMode, SimPlan};
use screen_limits::ScreeningConfig;

fn main() -> screen_limits::Result<()> {
    let config = ScreeningConfig::with_count(100, 0.05, 10, 1)?;
    for mode in [SimMode::BinomialExact, SimMode::PoissonApprox] {
        let r = simulate_per_person(&SimPlan::new(config, 200_000, 7, mode)?)?;
        println!("{:<16} {:.5} +- {:.5} (analytic {:.5})", r.mode, r.estimate, r.std_error, r.analytic);
    }
    for rho in [0.0, 0.1, 0.3] {
        let mode = SimMode::Copula(LatentCorrelation::Exchangeable { rho });
        let r = simulate_correlated(&SimPlan::new(config, 200_000, 8, mode)?)?;
        println!(
            "latent rho={rho:.1} tail={:.5} var={:.2} (independent {:.2})",
            r.tail.estimate, r.variance, r.independent_variance
        );
    }
    Ok(())
}
