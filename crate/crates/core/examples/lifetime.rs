use screen_limits::lifetime::{critical_time_analytic, critical_time_corrected, GrowthModel};

fn main() -> screen_limits::Result<()> {
    let n = 100_000;
    for gamma in [1.5, 2.0] {
        let model = GrowthModel::new(100.0, gamma, 0.01)?;
        for m in [10u64, 20, 40] {
            let r = critical_time_corrected(&model, m, n)?;
            println!(
                "gamma={gamma} m={m:>2} T*={:.3} with n={n}: {:.3} (lambda {:.3})",
                critical_time_analytic(&model, m),
                r.t_star_corrected,
                r.lambda_at_failure
            );
        }
    }
    Ok(())
}
