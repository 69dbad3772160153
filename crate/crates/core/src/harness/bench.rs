//! Runtime comparison of buffer-level and full-state value iteration.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SweepSpec;
use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::value_iteration::{value_iterate_degenerated, value_iterate_full, ViOptions};

pub const BENCH_HEADER: [&str; 7] = [
    "B",
    "X",
    "wallclock_degenerated_ms",
    "wallclock_full_ms",
    "speedup",
    "L_deg",
    "L_full",
];

/// Largest allowed gap between the two average costs.
pub const AGREEMENT_TOLERANCE: f64 = 1e-5;

/// Timed runs per solver; the median is reported.
pub const RUNS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub buffer_size: usize,
    pub max_request: usize,
    pub wallclock_degenerated_ms: f64,
    pub wallclock_full_ms: f64,
    pub speedup: f64,
    pub l_deg: f64,
    pub l_full: f64,
}

/// Each timed run repeats the solve until it spans at least this long, so
/// that sub-millisecond instances are not dominated by timer noise.
pub const MIN_RUN_MS: f64 = 20.0;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

/// Median over [`RUNS`] runs of the mean iteration-phase time per solve,
/// and the average cost found.
fn time_solver(solve: impl Fn() -> Result<(f64, f64)>) -> Result<(f64, f64)> {
    let (first_ms, l) = solve()?;
    let reps = ((MIN_RUN_MS / first_ms.max(1e-3)).ceil() as usize).clamp(1, 100_000);
    let mut runs = Vec::with_capacity(RUNS);
    for _ in 0..RUNS {
        let mut total = 0.0;
        for _ in 0..reps {
            total += solve()?.0;
        }
        runs.push(total / reps as f64);
    }
    Ok((median(runs), l))
}

/// Times both solvers on one instance. Only the iteration phase is timed;
/// policy assembly is shared work and excluded.
pub fn bench_instance(cfg: &SystemConfig, opts: &ViOptions) -> Result<BenchRow> {
    let (d, l_deg) = time_solver(|| {
        let (p, r) = value_iterate_degenerated(cfg, opts)?;
        Ok((r.wallclock.iterate_ms, p.average_cost))
    })?;
    let (f, l_full) = time_solver(|| {
        let (p, r) = value_iterate_full(cfg, opts)?;
        Ok((r.wallclock.iterate_ms, p.average_cost))
    })?;
    if (l_deg - l_full).abs() > AGREEMENT_TOLERANCE {
        return Err(Error::Disagreement(format!(
            "B={} X={}: buffer-level cost {l_deg} vs full-state cost {l_full}",
            cfg.buffer_size(),
            cfg.max_request()
        )));
    }
    Ok(BenchRow {
        buffer_size: cfg.buffer_size(),
        max_request: cfg.max_request(),
        wallclock_degenerated_ms: d,
        wallclock_full_ms: f,
        speedup: f / d,
        l_deg,
        l_full,
    })
}

/// Runs the grid of `spec` sequentially at its first eta.
pub fn run_bench(spec: &SweepSpec) -> Result<Vec<BenchRow>> {
    spec.validate()?;
    let opts = ViOptions::with_eps(spec.eps).method(spec.method);
    let eta = spec.etas[0];
    spec.grid
        .iter()
        .map(|v| bench_instance(&spec.instance(*v, eta)?, &opts))
        .collect()
}

/// True when speedup grows with the grid except for at most one inversion.
pub fn speedup_trend_ok(rows: &[BenchRow]) -> bool {
    rows.windows(2).filter(|w| w[1].speedup < w[0].speedup).count() <= 1
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER)?;
    for r in rows {
        w.write_record(&[
            r.buffer_size.to_string(),
            r.max_request.to_string(),
            format!("{:.5}", r.wallclock_degenerated_ms),
            format!("{:.5}", r.wallclock_full_ms),
            format!("{:.3}", r.speedup),
            r.l_deg.to_string(),
            r.l_full.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
