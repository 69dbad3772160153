//! Monte Carlo execution of a policy.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::value_iteration::Policy;

pub const GENERATOR: &str = "ChaCha8Rng";

/// Batches used for the batch-means standard error.
const BATCHES: usize = 100;

/// Inverse-CDF draw from a pmf.
pub fn sample_request<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    sample_index(p, rng.gen::<f64>())
}

fn sample_index(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, pi) in p.iter().enumerate() {
        if *pi <= 0.0 {
            continue;
        }
        acc += pi;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub steps: usize,
    pub seed: u64,
    pub generator: String,
    pub initial_buffer: usize,
    pub mean_energy: f64,
    /// Batch-means standard error of `mean_energy`.
    pub std_error: f64,
    /// Slots spent at each buffer level (occupancy at the start of the slot).
    pub buffer_histogram: Vec<u64>,
    /// Fraction of slots whose request exceeded the buffered items.
    pub on_demand_fraction: f64,
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Occupancy histogram as a distribution.
    pub fn occupancy(&self) -> Vec<f64> {
        self.buffer_histogram
            .iter()
            .map(|c| *c as f64 / self.steps as f64)
            .collect()
    }
}

/// Runs `policy` for `steps` slots from buffer level `b0`.
pub fn simulate_policy(policy: &Policy, steps: usize, seed: u64, b0: usize) -> Result<SimulationReport> {
    run(policy, steps, seed, b0, None::<&mut csv::Writer<std::io::Sink>>, None)
}

/// As [`simulate_policy`], also writing one CSV row `t,b,x,y,energy` per slot.
pub fn simulate_policy_with_trace<W: Write>(
    policy: &Policy,
    steps: usize,
    seed: u64,
    b0: usize,
    out: W,
) -> Result<SimulationReport> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["t", "b", "x", "y", "energy"])?;
    let report = run(policy, steps, seed, b0, Some(&mut writer), None)?;
    writer.flush()?;
    Ok(report)
}

/// Runs `policy` on a fixed request sequence; `seed` drives only the
/// policy's own randomization.
pub fn simulate_on_requests(policy: &Policy, requests: &[usize], seed: u64, b0: usize) -> Result<SimulationReport> {
    run(
        policy,
        requests.len(),
        seed,
        b0,
        None::<&mut csv::Writer<std::io::Sink>>,
        Some(requests),
    )
}

fn run<W: Write>(
    policy: &Policy,
    steps: usize,
    seed: u64,
    b0: usize,
    mut trace: Option<&mut csv::Writer<W>>,
    requests: Option<&[usize]>,
) -> Result<SimulationReport> {
    let cfg = &policy.config;
    if b0 > cfg.buffer_size() {
        return Err(Error::InvalidArgument(format!(
            "initial buffer {b0} exceeds capacity {}",
            cfg.buffer_size()
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("simulation needs at least one step".into()));
    }
    let p = cfg.pmf();
    if let Some(r) = requests {
        if let Some(x) = r.iter().find(|x| **x >= p.len()) {
            return Err(Error::InvalidArgument(format!("request {x} exceeds the maximum {}", p.len() - 1)));
        }
    }
    let energy_of: Vec<f64> = (0..=cfg.buffer_size() + cfg.max_request())
        .map(|y| cfg.eta().powi(y as i32) - 1.0)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut histogram = vec![0u64; cfg.levels()];
    let mut on_demand = 0usize;
    let batch_len = if steps >= BATCHES * 10 { steps / BATCHES } else { 1 };
    let mut batch_sums = Vec::with_capacity(steps / batch_len + 1);
    let mut batch_acc = 0.0;
    let mut total = 0.0;
    let mut b = b0;
    for t in 0..steps {
        let x = match requests {
            Some(r) => r[t],
            None => sample_request(p, &mut rng),
        };
        let next = sample_request(policy.decisions[b].row(x), &mut rng);
        if next + x < b {
            return Err(Error::PolicyViolation(format!(
                "state (b={b}, x={x}) moved to level {next}, a negative transmission"
            )));
        }
        let y = next + x - b;
        let e = energy_of[y];
        histogram[b] += 1;
        if x > b {
            on_demand += 1;
        }
        if let Some(w) = trace.as_deref_mut() {
            w.write_record(&[t.to_string(), b.to_string(), x.to_string(), y.to_string(), e.to_string()])?;
        }
        total += e;
        batch_acc += e;
        if (t + 1) % batch_len == 0 {
            batch_sums.push(batch_acc / batch_len as f64);
            batch_acc = 0.0;
        }
        b = next;
    }
    let mean = total / steps as f64;
    let k = batch_sums.len() as f64;
    let std_error = if batch_sums.len() > 1 {
        let bm = batch_sums.iter().sum::<f64>() / k;
        let var = batch_sums.iter().map(|s| (s - bm).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        0.0
    };
    Ok(SimulationReport {
        steps,
        seed,
        generator: GENERATOR.to_string(),
        initial_buffer: b0,
        mean_energy: mean,
        std_error,
        buffer_histogram: histogram,
        on_demand_fraction: on_demand as f64 / steps as f64,
    })
}
