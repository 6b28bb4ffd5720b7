use screen_limits::tailcore::{binomial_tail, lecam_bound, rate_function, tail_estimate};

fn main() -> screen_limits::Result<()> {
    let lambda = 5.0;
    println!("D(3) = {:.6}", rate_function(3.0)?);
    println!("{:>4} {:>14} {:>14} {:>14}", "m", "robbins", "exact", "chernoff");
    for m in [6u64, 8, 10, 15, 20] {
        let t = tail_estimate(lambda, m)?;
        println!("{m:>4} {:>14.6e} {:>14.6e} {:>14.6e}", t.robbins_lower, t.exact, t.chernoff_upper);
    }
    let (k, p, m) = (1000, 0.005, 15);
    println!(
        "binomial({k}, {p}) >= {m}: {:.6e}, Le Cam distance to Poisson <= {:.1e}",
        binomial_tail(k, p, m)?,
        lecam_bound(k, p)?
    );
    Ok(())
}
