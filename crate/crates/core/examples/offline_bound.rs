//! Offline lower bound: the taut-string schedule on sampled traces, next to
//! the causal optimum and the two closed-form references.

use proactive_cache::baselines::offline_estimate;
use proactive_cache::{infinite_buffer_cost, no_buffer_cost, taut_string_schedule, Result, SystemConfig, Trace, ViOptions};

fn main() -> Result<()> {
    let cfg = SystemConfig::uniform(10, 1.4, 20)?;
    let (policy, _) = proactive_cache::value_iterate_degenerated(&cfg, &ViOptions::default())?;
    let est = offline_estimate(&cfg, 10, 20_000, 7)?;
    println!("no buffer       {:.4}", no_buffer_cost(&cfg));
    println!("causal optimum  {:.4}", policy.average_cost);
    println!("offline         {:.4} +- {:.4}", est.mean, est.std_error);
    println!("mean-rate floor {:.4}", infinite_buffer_cost(&cfg));

    let short = Trace::new(vec![0, 4, 0, 0, 6, 1]);
    let sched = taut_string_schedule(&short, 3, 1.4, 0)?;
    println!("short trace sends {:?}", sched.rates);
    Ok(())
}
