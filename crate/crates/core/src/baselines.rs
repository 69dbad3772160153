//! Reference costs: real-time transmission, transmission at the mean rate,
//! and the offline optimum that knows the whole request trace in advance.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{rate_energy, SystemConfig};
use crate::sim::sample_request;

/// Average energy when every request is transmitted in its own slot.
pub fn no_buffer_cost(cfg: &SystemConfig) -> f64 {
    let eta = cfg.eta();
    cfg.pmf()
        .iter()
        .enumerate()
        .map(|(x, p)| p * (eta.powi(x as i32) - 1.0))
        .sum()
}

/// Energy of transmitting at the mean request rate every slot, `eta^E[x] - 1`.
pub fn infinite_buffer_cost(cfg: &SystemConfig) -> f64 {
    rate_energy(cfg.mean_request(), cfg.eta())
}

/// A finite sequence of requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub requests: Vec<usize>,
    /// Seed the trace was drawn with, if it was sampled.
    pub seed: Option<u64>,
}

impl Trace {
    pub fn new(requests: Vec<usize>) -> Self {
        Trace { requests, seed: None }
    }

    pub fn sample(cfg: &SystemConfig, len: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let requests = (0..len).map(|_| sample_request(cfg.pmf(), &mut rng)).collect();
        Trace {
            requests,
            seed: Some(seed),
        }
    }

    pub fn len(&self) -> usize {
        self.requests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

/// Offline transmission plan with real-valued per-slot rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineSchedule {
    pub requests: Vec<usize>,
    /// Per-slot transmissions `y_t`.
    pub rates: Vec<f64>,
    /// Cumulative transmissions `Y_t` after slot `t` (`Y_0 = 0` is not stored).
    pub cumulative: Vec<f64>,
    /// Cumulative demand `R_t` after slot `t`.
    pub demand: Vec<f64>,
    pub energy: Vec<f64>,
    pub total_energy: f64,
    pub buffer_size: usize,
    pub initial_buffer: usize,
}

impl OfflineSchedule {
    pub fn mean_energy(&self) -> f64 {
        self.total_energy / self.rates.len() as f64
    }

    /// CSV with header `t,x_t,y_t,Y_t,R_t,energy_t`; `t` counts from 1.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x_t", "y_t", "Y_t", "R_t", "energy_t"])?;
        for t in 0..self.rates.len() {
            w.write_record(&[
                (t + 1).to_string(),
                self.requests[t].to_string(),
                self.rates[t].to_string(),
                self.cumulative[t].to_string(),
                self.demand[t].to_string(),
                self.energy[t].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Point {
    t: f64,
    y: f64,
}

fn slope(a: Point, b: Point) -> f64 {
    (b.y - a.y) / (b.t - a.t)
}

/// Funnel of the shortest-path sweep. `lower` bends around demand-floor
/// points (slopes decreasing), `upper` around the buffer ceiling (slopes
/// increasing); both start at the current apex.
struct Funnel {
    vertices: Vec<Point>,
    lower: std::collections::VecDeque<Point>,
    upper: std::collections::VecDeque<Point>,
}

impl Funnel {
    fn new(start: Point) -> Self {
        Funnel {
            vertices: vec![start],
            lower: [start].into(),
            upper: [start].into(),
        }
    }

    fn push_upper(&mut self, q: Point) {
        while self.upper.len() >= 2 {
            let k = self.upper.len();
            if slope(self.upper[k - 2], q) <= slope(self.upper[k - 2], self.upper[k - 1]) {
                self.upper.pop_back();
            } else {
                break;
            }
        }
        self.upper.push_back(q);
        if self.upper.len() == 2 {
            while self.lower.len() >= 2 && slope(self.lower[0], q) < slope(self.lower[0], self.lower[1]) {
                self.lower.pop_front();
                self.vertices.push(self.lower[0]);
            }
            let apex = self.lower[0];
            self.upper.clear();
            self.upper.push_back(apex);
            self.upper.push_back(q);
        }
    }

    fn push_lower(&mut self, q: Point) {
        while self.lower.len() >= 2 {
            let k = self.lower.len();
            if slope(self.lower[k - 2], q) >= slope(self.lower[k - 2], self.lower[k - 1]) {
                self.lower.pop_back();
            } else {
                break;
            }
        }
        self.lower.push_back(q);
        if self.lower.len() == 2 {
            while self.upper.len() >= 2 && slope(self.upper[0], q) > slope(self.upper[0], self.upper[1]) {
                self.upper.pop_front();
                self.vertices.push(self.upper[0]);
            }
            let apex = self.upper[0];
            self.lower.clear();
            self.lower.push_back(apex);
            self.lower.push_back(q);
        }
    }

    fn finish(mut self) -> Vec<Point> {
        let rest = if self.upper.len() > 2 { &self.upper } else { &self.lower };
        self.vertices.extend(rest.iter().skip(1));
        self.vertices
    }
}

/// Minimum-energy offline schedule for a known request trace.
///
/// The cumulative transmission `Y_t` must stay between the demand already
/// served (`R_t - b0`) and that plus the buffer (`R_t - b0 + B`), start at 0
/// and end with an empty buffer. The shortest such path is optimal for every
/// convex per-slot cost, so it is found geometrically with a funnel sweep in
/// amortized linear time.
pub fn taut_string_schedule(trace: &Trace, buffer_size: usize, eta: f64, b0: usize) -> Result<OfflineSchedule> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("empty request trace".into()));
    }
    if b0 > buffer_size {
        return Err(Error::InvalidArgument(format!("initial buffer {b0} exceeds capacity {buffer_size}")));
    }
    let len = trace.len();
    let mut demand = Vec::with_capacity(len);
    let mut total = 0.0;
    for &x in &trace.requests {
        total += x as f64;
        demand.push(total);
    }
    let floor = |t: usize| demand[t - 1] - b0 as f64;
    let width = buffer_size as f64;

    let mut funnel = Funnel::new(Point { t: 0.0, y: 0.0 });
    for t in 1..len {
        let lo = floor(t);
        funnel.push_upper(Point { t: t as f64, y: lo + width });
        funnel.push_lower(Point { t: t as f64, y: lo });
    }
    let end = Point {
        t: len as f64,
        y: floor(len).max(0.0),
    };
    funnel.push_upper(end);
    funnel.push_lower(end);
    let vertices = funnel.finish();

    let mut cumulative = Vec::with_capacity(len);
    let mut seg = 0;
    for t in 1..=len {
        let tf = t as f64;
        while vertices[seg + 1].t < tf {
            seg += 1;
        }
        let (a, b) = (vertices[seg], vertices[seg + 1]);
        let y = if b.t == tf { b.y } else { a.y + slope(a, b) * (tf - a.t) };
        cumulative.push(y);
    }
    let mut rates = Vec::with_capacity(len);
    let mut prev = 0.0;
    for y in &cumulative {
        rates.push((y - prev).max(0.0));
        prev = *y;
    }
    let energy: Vec<f64> = rates.iter().map(|y| rate_energy(*y, eta)).collect();
    let total_energy = energy.iter().sum();
    Ok(OfflineSchedule {
        requests: trace.requests.clone(),
        rates,
        cumulative,
        demand,
        energy,
        total_energy,
        buffer_size,
        initial_buffer: b0,
    })
}

/// Mean and standard error of the offline per-slot energy over independent traces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfflineEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub traces: usize,
    pub trace_len: usize,
}

/// Draws `traces` request traces of length `len` (seeds `seed, seed + 1, ...`)
/// and averages the offline per-slot energy.
pub fn offline_estimate(cfg: &SystemConfig, traces: usize, len: usize, seed: u64) -> Result<OfflineEstimate> {
    if traces == 0 {
        return Err(Error::InvalidArgument("need at least one trace".into()));
    }
    let mut means = Vec::with_capacity(traces);
    for i in 0..traces {
        let trace = Trace::sample(cfg, len, seed.wrapping_add(i as u64));
        means.push(taut_string_schedule(&trace, cfg.buffer_size(), cfg.eta(), 0)?.mean_energy());
    }
    let n = means.len() as f64;
    let mean = means.iter().sum::<f64>() / n;
    let std_error = if means.len() > 1 {
        let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Ok(OfflineEstimate {
        mean,
        std_error,
        traces,
        trace_len: len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_forms() {
        let cfg = SystemConfig::new(3, 1.4, vec![1.0]).unwrap();
        assert_eq!(no_buffer_cost(&cfg), 0.0);
        let cfg = SystemConfig::new(3, 2.0, vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(no_buffer_cost(&cfg), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(infinite_buffer_cost(&cfg), 2f64.sqrt() - 1.0, epsilon = 1e-15);
        let cfg = SystemConfig::uniform(10, 1.4, 20).unwrap();
        let closed = (1.4f64.powi(21) - 1.0) / (0.4 * 21.0) - 1.0;
        assert_abs_diff_eq!(no_buffer_cost(&cfg), closed, epsilon = 1e-9);
        assert_abs_diff_eq!(infinite_buffer_cost(&cfg), 1.4f64.powi(10) - 1.0, epsilon = 1e-9);
        let point = SystemConfig::new(3, 1.9, vec![0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(no_buffer_cost(&point), infinite_buffer_cost(&point), epsilon = 1e-12);
    }

    #[test]
    fn constant_trace_is_flat() {
        for b in 0..4 {
            let s = taut_string_schedule(&Trace::new(vec![3, 3, 3]), b, 1.4, 0).unwrap();
            for y in &s.rates {
                assert_abs_diff_eq!(*y, 3.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_slot_example() {
        let s = taut_string_schedule(&Trace::new(vec![0, 4]), 2, 1.4, 0).unwrap();
        assert_abs_diff_eq!(s.rates[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.rates[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.total_energy, 1.92, epsilon = 1e-12);
    }

    #[test]
    fn zero_width_corridor_follows_demand() {
        let trace = Trace::new(vec![4, 0, 2, 7, 1, 1, 0, 5]);
        let s = taut_string_schedule(&trace, 0, 1.4, 0).unwrap();
        for (y, x) in s.rates.iter().zip(&trace.requests) {
            assert_abs_diff_eq!(*y, *x as f64, epsilon = 1e-12);
        }
    }

    #[test]
    fn initial_buffer_is_spent() {
        let s = taut_string_schedule(&Trace::new(vec![2, 2]), 2, 1.4, 2).unwrap();
        assert_abs_diff_eq!(s.rates[0] + s.rates[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.rates[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_header() {
        let s = taut_string_schedule(&Trace::new(vec![1, 2]), 1, 1.4, 0).unwrap();
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("t,x_t,y_t,Y_t,R_t,energy_t\n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn empty_trace_rejected() {
        assert!(taut_string_schedule(&Trace::new(vec![]), 1, 1.4, 0).is_err());
    }
}
