//! Experiment drivers shared by the command-line tool and the examples.

pub mod bench;
pub mod random;
pub mod sweep;
pub mod validate;

use serde::{Deserialize, Serialize};

use crate::bellman::BellmanMethod;
use crate::error::{Error, Result};
use crate::model::SystemConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepVariable {
    /// Grid over `B` with a fixed request distribution.
    BufferSize,
    /// Grid over `X` with uniform requests on `{0..X}` and a fixed `B`.
    RequestMax,
    /// Grid over `B` with uniform requests on `{0..round(ratio * B)}`.
    Runtime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Distribution {
    UniformMax { uniform_max: usize },
    Pmf { pmf: Vec<f64> },
}

/// Description of a parameter sweep, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Distribution>,
    #[serde(default, rename = "B", skip_serializing_if = "Option::is_none")]
    pub buffer_size: Option<usize>,
    #[serde(default = "default_ratio")]
    pub request_ratio: f64,
    pub etas: Vec<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default = "default_trace_len")]
    pub trace_len: usize,
    #[serde(default)]
    pub method: BellmanMethod,
}

fn default_ratio() -> f64 {
    1.5
}
fn default_eps() -> f64 {
    crate::value_iteration::DEFAULT_EPS
}
fn default_replicas() -> usize {
    20
}
fn default_trace_len() -> usize {
    100_000
}

impl SweepSpec {
    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidConfig("sweep grid is empty".into()));
        }
        if self.etas.is_empty() || self.etas.iter().any(|e| !(*e > 1.0)) {
            return Err(Error::InvalidConfig("eta values must be > 1".into()));
        }
        if !(self.eps > 0.0) {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        match self.variable {
            SweepVariable::BufferSize if self.distribution.is_none() => Err(Error::InvalidConfig(
                "buffer-size sweep needs a \"distribution\"".into(),
            )),
            SweepVariable::RequestMax if self.buffer_size.is_none() => {
                Err(Error::InvalidConfig("request-max sweep needs \"B\"".into()))
            }
            SweepVariable::Runtime if !(self.request_ratio >= 0.0) => {
                Err(Error::InvalidConfig("request_ratio must be non-negative".into()))
            }
            _ => Ok(()),
        }
    }

    /// Problem instance at grid value `value` and energy base `eta`.
    pub fn instance(&self, value: usize, eta: f64) -> Result<SystemConfig> {
        match self.variable {
            SweepVariable::BufferSize => match self.distribution.as_ref() {
                Some(Distribution::UniformMax { uniform_max }) => SystemConfig::uniform(value, eta, *uniform_max),
                Some(Distribution::Pmf { pmf }) => SystemConfig::new(value, eta, pmf.clone()),
                None => Err(Error::InvalidConfig("missing distribution".into())),
            },
            SweepVariable::RequestMax => {
                let b = self
                    .buffer_size
                    .ok_or_else(|| Error::InvalidConfig("missing \"B\"".into()))?;
                SystemConfig::uniform(b, eta, value)
            }
            SweepVariable::Runtime => {
                let x = (self.request_ratio * value as f64).round() as usize;
                SystemConfig::uniform(value, eta, x)
            }
        }
    }
}
