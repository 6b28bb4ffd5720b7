use screen_limits::reliability::{critical_population, system_risk};
use screen_limits::ScreeningConfig;

fn main() -> screen_limits::Result<()> {
    let base = ScreeningConfig::with_count(1000, 0.005, 15, 1)?;
    for n in [1u64, 1_000, 100_000, 1_000_000] {
        let r = system_risk(&base.with_population(n)?)?;
        println!(
            "n={n:>9} q={:.4e} alerts={:>9.2} P(any)={:.6} ln P(none)={:.2}",
            r.per_person_q, r.expected_false_alerts, r.prob_at_least_one, r.log_complement
        );
    }
    let crit = critical_population(5.0, 3.0)?;
    println!("critical population at lambda=5, c=3: {:.1} (asymptotic {:.1})", crit.refined, crit.asymptotic);
    Ok(())
}
