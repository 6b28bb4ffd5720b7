use screen_limits::posterior::{bayes_critical_population, classify_regime, ppv, BayesContext};

fn main() -> screen_limits::Result<()> {
    let (r, s, alpha, q) = (10.0, 0.9, 0.5, 2.26e-4);
    for n in [1_000u64, 100_000, 10_000_000] {
        let ctx = BayesContext::new(r, s, alpha, q, n)?;
        let rep = ppv(&ctx)?;
        let verdict = classify_regime(&ctx);
        println!("n={n:>9} PPV={:.5} FDR={:.5} regime={:?}", rep.ppv, rep.fdr, verdict.regime);
    }
    println!("PPV falls to {alpha} at n = {:.0}", bayes_critical_population(r, s, alpha, q)?);
    Ok(())
}
