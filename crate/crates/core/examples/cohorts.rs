use screen_limits::cohorts::{
    amplification_window, cohort_system_risk, disparity_ratio, dominance_decomposition, Cohort, CohortProfile,
};

fn main() -> screen_limits::Result<()> {
    let profile = CohortProfile::new(vec![
        Cohort { label: "A".into(), n: 100_000, p: 0.005 },
        Cohort { label: "B".into(), n: 100_000, p: 0.02 },
    ])?;
    let risk = cohort_system_risk(&profile, 100, 3)?;
    for g in &risk.groups {
        println!("{} lambda={:.2} q={:.5} alerts={:.1} share={:.3}", g.label, g.lambda, g.q, g.mass, g.share);
    }
    let d = dominance_decomposition(&profile, 100, 3)?;
    println!("dominant group {} carries {:.1} expected alerts", d.dominant_label, d.dominant_mass);
    println!("q_B / q_A at k=100: {:.1}", disparity_ratio(0.005, 0.02, 100, 3)?);
    let (lo, hi) = amplification_window(0.005, 0.02, 3)?;
    println!("only B has crossed its threshold for k in ({lo:.0}, {hi:.0})");
    Ok(())
}
