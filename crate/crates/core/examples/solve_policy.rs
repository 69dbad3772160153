//! Solves for the optimal policy and prints its cost and buffer occupancy.

use proactive_cache::{no_buffer_cost, value_iterate_degenerated, Result, SystemConfig, ViOptions};

fn main() -> Result<()> {
    let cfg = SystemConfig::uniform(8, 1.4, 12)?;
    let (policy, report) = value_iterate_degenerated(&cfg, &ViOptions::with_eps(1e-8))?;
    println!("L = {:.6} (no buffer {:.6})", policy.average_cost, no_buffer_cost(&cfg));
    println!("iterations = {}, final span = {:.2e}", report.iterations, report.final_span);
    for (b, r) in policy.r.iter().enumerate() {
        println!("r[{b}] = {r:.4}");
    }
    Ok(())
}
