//! Fills the optimal decision matrix for one next-level distribution and
//! prints the staircase it walks.

use proactive_cache::fast::evaluate_h;
use proactive_cache::{MarginalVector, Result, SystemConfig};

fn main() -> Result<()> {
    let cfg = SystemConfig::new(3, 1.4, vec![0.1, 0.2, 0.3, 0.4])?;
    // Next-level distribution for current level b = 2.
    let a = MarginalVector::new(2, vec![0.3, 0.3, 0.2, 0.2])?;
    let h = evaluate_h(&cfg, &a)?;

    println!("h(a) = {:.6}", h.value);
    println!("subgradient = {:?}", h.subgradient);
    for (m, row) in h.decision.rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|d| format!("{d:.3}")).collect();
        println!("x = {m}: [{}]", cells.join(", "));
    }
    for c in &h.stripe.cells {
        println!("  cell ({}, {}) mass {:.3}", c.row, c.col, c.mass);
    }
    Ok(())
}
