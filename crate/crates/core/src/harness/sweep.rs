//! Parameter sweeps: optimal policy against the three baselines.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SweepSpec;
use crate::baselines::{infinite_buffer_cost, no_buffer_cost, offline_estimate};
use crate::error::{Error, Result};
use crate::value_iteration::{value_iterate_degenerated, ViOptions};

pub const SWEEP_HEADER: [&str; 10] = [
    "variable",
    "eta",
    "L_mdp",
    "cost_no_buffer",
    "cost_inf_buffer",
    "cost_taut_mean",
    "cost_taut_stderr",
    "iterations",
    "wallclock_ms",
    "status",
];

/// One grid point. Numeric fields are NaN when `status` is not `"ok"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variable: usize,
    pub eta: f64,
    pub l_mdp: f64,
    pub cost_no_buffer: f64,
    pub cost_inf_buffer: f64,
    pub cost_taut_mean: f64,
    pub cost_taut_stderr: f64,
    pub iterations: usize,
    pub wallclock_ms: f64,
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    fn failed(variable: usize, eta: f64, err: &Error) -> Self {
        SweepRow {
            variable,
            eta,
            l_mdp: f64::NAN,
            cost_no_buffer: f64::NAN,
            cost_inf_buffer: f64::NAN,
            cost_taut_mean: f64::NAN,
            cost_taut_stderr: f64::NAN,
            iterations: 0,
            wallclock_ms: f64::NAN,
            status: format!("failed: {err}"),
        }
    }
}

/// Seed of the offline traces at grid point `index`.
pub fn point_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64).wrapping_mul(1_000_003))
}

/// Evaluates every `(grid value, eta)` pair, in grid order then eta order.
///
/// Points run in parallel on at most `threads` workers (all cores when
/// `None`). A failing point yields a row with a `failed: ...` status and the
/// others still run. The trace seeds depend only on `seed` and the position
/// of the point, so the baseline columns do not depend on `threads`.
pub fn run_sweep(spec: &SweepSpec, seed: u64, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points: Vec<(usize, f64)> = spec
        .grid
        .iter()
        .flat_map(|v| spec.etas.iter().map(move |e| (*v, *e)))
        .collect();
    let workers = threads
        .unwrap_or_else(rayon::current_num_threads)
        .clamp(1, points.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let rows = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, (value, eta))| {
                evaluate_point(spec, *value, *eta, point_seed(seed, i))
                    .unwrap_or_else(|e| SweepRow::failed(*value, *eta, &e))
            })
            .collect()
    });
    Ok(rows)
}

fn evaluate_point(spec: &SweepSpec, value: usize, eta: f64, seed: u64) -> Result<SweepRow> {
    let cfg = spec.instance(value, eta)?;
    let opts = ViOptions::with_eps(spec.eps).method(spec.method);
    let start = Instant::now();
    let (policy, report) = value_iterate_degenerated(&cfg, &opts)?;
    let wallclock_ms = start.elapsed().as_secs_f64() * 1e3;
    let (taut_mean, taut_se) = if spec.replicas > 0 && spec.trace_len > 0 {
        let est = offline_estimate(&cfg, spec.replicas, spec.trace_len, seed)?;
        (est.mean, est.std_error)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(SweepRow {
        variable: value,
        eta,
        l_mdp: policy.average_cost,
        cost_no_buffer: no_buffer_cost(&cfg),
        cost_inf_buffer: infinite_buffer_cost(&cfg),
        cost_taut_mean: taut_mean,
        cost_taut_stderr: taut_se,
        iterations: report.iterations,
        wallclock_ms,
        status: "ok".into(),
    })
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record(&[
            r.variable.to_string(),
            r.eta.to_string(),
            r.l_mdp.to_string(),
            r.cost_no_buffer.to_string(),
            r.cost_inf_buffer.to_string(),
            r.cost_taut_mean.to_string(),
            r.cost_taut_stderr.to_string(),
            r.iterations.to_string(),
            format!("{:.3}", r.wallclock_ms),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A gnuplot script drawing the four cost curves of `csv_path` per eta.
pub fn gnuplot_script(csv_path: &Path, x_label: &str, etas: &[f64]) -> String {
    let file = csv_path.display();
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set xlabel '{x_label}'\n"));
    s.push_str("set ylabel 'average energy per slot'\n");
    s.push_str("set logscale y\n");
    let mut plots = Vec::new();
    for (k, eta) in etas.iter().enumerate() {
        let sel = format!("($2=={eta} ? $COL : 1/0)");
        for (col, name) in [(3, "optimal"), (4, "no buffer"), (5, "infinite buffer"), (6, "offline")] {
            plots.push(format!(
                "'{file}' using 1:{} with linespoints lt {} title '{name}, eta={eta}'",
                sel.replace("COL", &col.to_string()),
                k + 1
            ));
        }
    }
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}
