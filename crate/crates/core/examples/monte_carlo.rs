//! Checks a solved policy against a seeded simulation.

use proactive_cache::{simulate_policy, value_iterate_degenerated, Result, SystemConfig, ViOptions};

fn main() -> Result<()> {
    let cfg = SystemConfig::uniform(5, 2.0, 4)?;
    let (policy, _) = value_iterate_degenerated(&cfg, &ViOptions::default())?;
    let rep = simulate_policy(&policy, 500_000, 42, 0)?;
    println!("model L = {:.5}", policy.average_cost);
    println!("simulated = {:.5} +- {:.5}", rep.mean_energy, rep.std_error);
    println!("served on demand in {:.1}% of slots", 100.0 * rep.on_demand_fraction);
    Ok(())
}
