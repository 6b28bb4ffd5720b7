use screen_limits::reliability::{phase_scan, transition_width};

fn main() -> screen_limits::Result<()> {
    let lambdas = [25.0, 100.0, 400.0];
    for alpha in [0.5, 0.9, 1.0, 1.1, 1.5] {
        let probs: Vec<String> =
            phase_scan(&lambdas, 1.5, alpha)?.iter().map(|r| format!("{:.4}", r.prob)).collect();
        println!("alpha={alpha:.1} prob={}", probs.join(" "));
    }
    for lambda in lambdas {
        println!("lambda={lambda:>5} width(0.1..0.9)={:.4}", transition_width(lambda, 1.5, 0.1, 0.9)?);
    }
    Ok(())
}
