//! Problem instance, buffer recursion and the per-slot energy model.
//!
//! A slot starts with `b` items buffered and a request of `x` items. The
//! server transmits `y` items, leaving `b + y - x` items for the next slot.
//! Transmitting `y` items costs `eta^y - 1`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accepted deviation of the pmf total from one.
pub const PMF_TOLERANCE: f64 = 1e-12;
/// Inputs whose pmf total is off by more than this are rejected rather than rescaled.
pub const PMF_RENORMALIZE_LIMIT: f64 = 1e-9;

/// Buffer capacity, energy base and request distribution.
///
/// The maximum request `X` is implied by the pmf length (`X = pmf.len() - 1`);
/// trailing zero entries are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigDocument", into = "ConfigDocument")]
pub struct SystemConfig {
    buffer_size: usize,
    eta: f64,
    pmf: Vec<f64>,
}

/// JSON form: `{"B": 4, "eta": 1.4, "pmf": [...]}` or `{"B": 4, "eta": 1.4, "uniform_max": 20}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    #[serde(rename = "B")]
    buffer_size: usize,
    eta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pmf: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uniform_max: Option<usize>,
}

impl TryFrom<ConfigDocument> for SystemConfig {
    type Error = Error;

    fn try_from(doc: ConfigDocument) -> Result<Self> {
        match (doc.pmf, doc.uniform_max) {
            (Some(pmf), None) => SystemConfig::new(doc.buffer_size, doc.eta, pmf),
            (None, Some(x)) => SystemConfig::uniform(doc.buffer_size, doc.eta, x),
            (Some(_), Some(_)) => Err(Error::InvalidConfig(
                "give either \"pmf\" or \"uniform_max\", not both".into(),
            )),
            (None, None) => Err(Error::InvalidConfig(
                "missing request distribution (\"pmf\" or \"uniform_max\")".into(),
            )),
        }
    }
}

impl From<SystemConfig> for ConfigDocument {
    fn from(cfg: SystemConfig) -> Self {
        ConfigDocument {
            buffer_size: cfg.buffer_size,
            eta: cfg.eta,
            pmf: Some(cfg.pmf),
            uniform_max: None,
        }
    }
}

impl SystemConfig {
    pub fn new(buffer_size: usize, eta: f64, pmf: Vec<f64>) -> Result<Self> {
        if !(eta.is_finite() && eta > 1.0) {
            return Err(Error::InvalidConfig(format!("eta must be > 1, got {eta}")));
        }
        let pmf = normalize_pmf(pmf)?;
        Ok(SystemConfig {
            buffer_size,
            eta,
            pmf,
        })
    }

    /// Uniform requests over `{0, ..., max_request}`.
    pub fn uniform(buffer_size: usize, eta: f64, max_request: usize) -> Result<Self> {
        let w = 1.0 / (max_request + 1) as f64;
        Self::new(buffer_size, eta, vec![w; max_request + 1])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Buffer capacity `B` in content items.
    pub fn buffer_size(&self) -> usize {
        self.buffer_size
    }

    /// Largest possible request `X`.
    pub fn max_request(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Number of buffer levels, `B + 1`.
    pub fn levels(&self) -> usize {
        self.buffer_size + 1
    }

    pub fn mean_request(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(x, p)| x as f64 * p).sum()
    }

    /// Same distribution and energy base with a different buffer.
    pub fn with_buffer_size(&self, buffer_size: usize) -> Self {
        SystemConfig {
            buffer_size,
            ..self.clone()
        }
    }

    pub(crate) fn powers(&self) -> PowerTable {
        PowerTable::new(self.eta, self.buffer_size, self.max_request())
    }
}

fn normalize_pmf(mut pmf: Vec<f64>) -> Result<Vec<f64>> {
    if pmf.is_empty() {
        return Err(Error::InvalidConfig("pmf is empty".into()));
    }
    if let Some((i, p)) = pmf
        .iter()
        .enumerate()
        .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
    {
        return Err(Error::InvalidConfig(format!("pmf[{i}] = {p} is not a probability")));
    }
    let total: f64 = pmf.iter().sum();
    if (total - 1.0).abs() > PMF_RENORMALIZE_LIMIT {
        return Err(Error::InvalidConfig(format!("pmf sums to {total}, expected 1")));
    }
    if (total - 1.0).abs() > PMF_TOLERANCE {
        pmf.iter_mut().for_each(|p| *p /= total);
    }
    Ok(pmf)
}

/// A full state: buffer occupancy and the current request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct State {
    pub b: usize,
    pub x: usize,
}

impl State {
    pub fn new(cfg: &SystemConfig, b: usize, x: usize) -> Result<Self> {
        if b > cfg.buffer_size() || x > cfg.max_request() {
            return Err(Error::InvalidArgument(format!(
                "state (b={b}, x={x}) outside 0..={} x 0..={}",
                cfg.buffer_size(),
                cfg.max_request()
            )));
        }
        Ok(State { b, x })
    }

    pub fn degenerated(self) -> DegeneratedState {
        DegeneratedState { b: self.b }
    }
}

/// A buffer level, standing for every state that shares it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegeneratedState {
    pub b: usize,
}

impl DegeneratedState {
    pub fn new(cfg: &SystemConfig, b: usize) -> Result<Self> {
        if b > cfg.buffer_size() {
            return Err(Error::InvalidArgument(format!(
                "buffer level {b} exceeds capacity {}",
                cfg.buffer_size()
            )));
        }
        Ok(DegeneratedState { b })
    }
}

/// Energy spent transmitting `y` items in one slot: `eta^y - 1`.
pub fn energy_cost(y: i64, eta: f64) -> Result<f64> {
    if y < 0 {
        return Err(Error::PolicyViolation(format!("negative transmission y = {y}")));
    }
    Ok(rate_energy(y as f64, eta))
}

/// Same law for a real-valued rate, used by the offline schedule.
pub fn rate_energy(y: f64, eta: f64) -> f64 {
    eta.powf(y) - 1.0
}

/// Feasible transmissions from `(b, x)`: `y` in `[max(0, x - b), B - b + x]`.
pub fn action_bounds(b: usize, x: usize, buffer_size: usize) -> RangeInclusive<usize> {
    debug_assert!(b <= buffer_size);
    x.saturating_sub(b)..=buffer_size - b + x
}

/// Next-slot buffer levels reachable from `(b, x)`: `[max(0, b - x), B]`.
pub fn next_buffer_range(b: usize, x: usize, buffer_size: usize) -> RangeInclusive<usize> {
    b.saturating_sub(x)..=buffer_size
}

/// Buffer occupancy after serving `x` and transmitting `y`.
pub fn next_buffer(b: usize, x: usize, y: usize, buffer_size: usize) -> Result<usize> {
    let next = (b + y) as i64 - x as i64;
    if next < 0 || next as usize > buffer_size {
        return Err(Error::PolicyViolation(format!(
            "transmitting {y} from (b={b}, x={x}) leaves {next} items, outside 0..={buffer_size}"
        )));
    }
    Ok(next as usize)
}

/// Expected energy in state `s` when the next buffer level is drawn from `d`.
///
/// `d` is a pmf over `0..=B`; it may not put mass below `b - x`.
pub fn expected_state_cost(s: State, d: &[f64], eta: f64) -> Result<f64> {
    let floor = s.b.saturating_sub(s.x);
    let below: f64 = d[..floor.min(d.len())].iter().sum();
    if below > 1e-12 {
        return Err(Error::Infeasible(format!(
            "decision for (b={}, x={}) puts mass {below:e} below next level {floor}",
            s.b, s.x
        )));
    }
    if s.b >= d.len() {
        return Err(Error::DimensionMismatch(format!(
            "buffer level {} with a decision over {} levels",
            s.b,
            d.len()
        )));
    }
    let offset = s.x as i32 - s.b as i32;
    let weighted: f64 = d
        .iter()
        .enumerate()
        .skip(floor)
        .map(|(n, dn)| dn * eta.powi(n as i32 + offset))
        .sum();
    Ok(weighted - 1.0)
}

/// Long-run average energy `r' * Omega * p`.
pub fn average_cost(r: &[f64], omega: &[Vec<f64>], p: &[f64]) -> Result<f64> {
    if omega.len() != r.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} buffer levels in r, {} rows in Omega",
            r.len(),
            omega.len()
        )));
    }
    let mut total = 0.0;
    for (rb, row) in r.iter().zip(omega) {
        if row.len() != p.len() {
            return Err(Error::DimensionMismatch(format!(
                "Omega row has {} columns, pmf has {} entries",
                row.len(),
                p.len()
            )));
        }
        total += rb * row.iter().zip(p).map(|(w, px)| w * px).sum::<f64>();
    }
    Ok(total)
}

/// `eta^k` for every exponent `k` in `[-B, X + B]` that the solvers touch.
#[derive(Debug, Clone)]
pub(crate) struct PowerTable {
    offset: usize,
    values: Vec<f64>,
}

impl PowerTable {
    pub(crate) fn new(eta: f64, buffer_size: usize, max_request: usize) -> Self {
        let values = (0..=(2 * buffer_size + max_request))
            .map(|i| eta.powi(i as i32 - buffer_size as i32))
            .collect();
        PowerTable {
            offset: buffer_size,
            values,
        }
    }

    /// `eta^(m + n - b)`: cost weight of request `m` moving level `b` to `n`.
    #[inline]
    pub(crate) fn transition(&self, m: usize, n: usize, b: usize) -> f64 {
        self.values[m + n + self.offset - b]
    }
}
