//! Times buffer-level against full-state value iteration as the instance grows.

use proactive_cache::harness::bench::{bench_instance, speedup_trend_ok};
use proactive_cache::{Result, SystemConfig, ViOptions};

fn main() -> Result<()> {
    let opts = ViOptions::default();
    let mut rows = Vec::new();
    for b in [2, 4, 8, 12] {
        let cfg = SystemConfig::uniform(b, 1.4, (3 * b).div_ceil(2))?;
        let row = bench_instance(&cfg, &opts)?;
        println!(
            "B = {:2} X = {:2}: {:.4} ms vs {:.4} ms, speedup {:.1}",
            row.buffer_size, row.max_request, row.wallclock_degenerated_ms, row.wallclock_full_ms, row.speedup
        );
        rows.push(row);
    }
    println!("speedup grows with size: {}", speedup_trend_ok(&rows));
    Ok(())
}
