use screen_limits::effdim::{
    adjusted_limits, k_eff_spatial, k_eff_temporal, SpatialCorrelation, TemporalCorrelation,
};

fn main() -> screen_limits::Result<()> {
    let k_sp = k_eff_spatial(&SpatialCorrelation::new(1e8, 500.0)?);
    let wide = adjusted_limits(10_000, 0.005, 1.5, k_sp, true)?;
    println!(
        "spatial: k_eff={k_sp:.2} exponent {:.3} -> {:.4}, n_crit {:.3e} -> {:.2}",
        wide.unadjusted_exponent, wide.adjusted_exponent, wide.unadjusted_n_crit, wide.adjusted_n_crit
    );
    let daily = k_eff_temporal(&TemporalCorrelation::exponential(365, 30.0)?);
    let simple = daily.simple.unwrap_or(daily.k_eff);
    println!("temporal: k_eff={:.2} (simple {simple:.3})", daily.k_eff);
    let adj = adjusted_limits(365, 0.02, 12.0 / 7.3, simple, true)?;
    println!("n_crit {:.2} -> {:.2}", adj.unadjusted_n_crit, adj.adjusted_n_crit);
    Ok(())
}
