//! Sweeps the buffer size and writes the comparison table to stdout.

use proactive_cache::harness::sweep::{run_sweep, write_sweep_csv};
use proactive_cache::harness::{Distribution, SweepSpec, SweepVariable};
use proactive_cache::Result;

fn main() -> Result<()> {
    let spec = SweepSpec {
        variable: SweepVariable::BufferSize,
        grid: vec![0, 2, 4, 8, 16],
        distribution: Some(Distribution::UniformMax { uniform_max: 20 }),
        buffer_size: None,
        request_ratio: 1.5,
        etas: vec![1.4, 2.0],
        eps: 1e-6,
        seed: None,
        replicas: 4,
        trace_len: 10_000,
        method: Default::default(),
    };
    let rows = run_sweep(&spec, 2024, None)?;
    write_sweep_csv(&rows, std::io::stdout())
}
