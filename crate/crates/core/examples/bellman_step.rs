//! One Bellman step at every buffer level, exact and in marginal space.

use proactive_cache::{bellman_convex_marginal, bellman_exact_rowwise, Result, SolverOptions, SystemConfig};

fn main() -> Result<()> {
    let cfg = SystemConfig::uniform(4, 1.4, 6)?;
    // A convex continuation: fuller buffers are worth more.
    let v: Vec<f64> = (0..=cfg.buffer_size()).map(|n| -0.8 * n as f64 + 0.05 * (n * n) as f64).collect();
    let opts = SolverOptions::default();
    for b in 0..=cfg.buffer_size() {
        let exact = bellman_exact_rowwise(b, &cfg, &v);
        let marginal = bellman_convex_marginal(b, &cfg, &v, &opts)?;
        println!(
            "b = {b}: exact {:.8}  marginal {:.8}  next-level law {:?}",
            exact.value,
            marginal.value,
            exact.a_star.as_slice().iter().map(|x| (x * 1e3).round() / 1e3).collect::<Vec<_>>()
        );
    }
    Ok(())
}
