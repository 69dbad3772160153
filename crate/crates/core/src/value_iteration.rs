//! Relative value iteration and policy assembly.
//!
//! [`value_iterate_degenerated`] keeps one value per buffer level and runs a
//! Bellman step per level each sweep. [`value_iterate_full`] is the textbook
//! alternative over every `(b, x)` state, kept as a baseline. Both subtract
//! the value of the first state after each sweep and stop when the span of
//! the one-sweep differences drops below `eps`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bellman::{rowwise_targets, BellmanMethod, MarginalSolver, SolverOptions};
use crate::error::{Error, Result};
use crate::fast::DecisionMatrix;
use crate::model::{average_cost, SystemConfig};
use crate::stationary::stationary_distribution;

pub const DEFAULT_EPS: f64 = 1e-6;
pub const DEFAULT_MAX_SWEEPS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ViOptions {
    pub eps: f64,
    pub max_sweeps: usize,
    pub solver: SolverOptions,
}

impl Default for ViOptions {
    fn default() -> Self {
        ViOptions {
            eps: DEFAULT_EPS,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            solver: SolverOptions::default(),
        }
    }
}

impl ViOptions {
    pub fn with_eps(eps: f64) -> Self {
        ViOptions {
            eps,
            ..Self::default()
        }
    }

    pub fn method(mut self, method: BellmanMethod) -> Self {
        self.solver.method = method;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {}", self.eps)));
        }
        self.solver.validate()
    }
}

/// Relative values, renormalized so that the first entry is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueVector {
    pub v: Vec<f64>,
    pub t: usize,
}

impl ValueVector {
    pub fn zeros(len: usize) -> Self {
        ValueVector { v: vec![0.0; len], t: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSpace {
    Degenerated,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub space: StateSpace,
    pub method: BellmanMethod,
    pub iterations: usize,
    pub multichain: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    /// Time spent in the value-iteration loop.
    pub iterate_ms: f64,
    /// Time spent assembling the policy (transition matrix, stationary solve).
    pub assemble_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViReport {
    pub iterations: usize,
    pub final_span: f64,
    pub wallclock: PhaseTimes,
    pub method: BellmanMethod,
    pub space: StateSpace,
    /// Midpoint of the one-sweep differences, per sweep.
    pub gain_trace: Vec<f64>,
}

/// A stationary policy with its induced chain over buffer levels and its cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub config: SystemConfig,
    pub decisions: Vec<DecisionMatrix>,
    #[serde(rename = "A")]
    pub transition: Vec<Vec<f64>>,
    pub r: Vec<f64>,
    #[serde(rename = "Omega")]
    pub state_costs: Vec<Vec<f64>>,
    #[serde(rename = "L")]
    pub average_cost: f64,
    #[serde(rename = "g")]
    pub gain: f64,
    pub eps: f64,
    pub solver: SolverMeta,
}

impl Policy {
    /// Builds the transition matrix, stationary distribution and cost of a
    /// decision family.
    pub fn assemble(
        cfg: &SystemConfig,
        decisions: Vec<DecisionMatrix>,
        gain: f64,
        eps: f64,
        solver: SolverMeta,
    ) -> Result<Policy> {
        check_decisions(cfg, &decisions)?;
        let transition = build_transition_matrix(&decisions, cfg.pmf())?;
        let stationary = stationary_distribution(&transition)?;
        let state_costs = state_cost_matrix(cfg, &decisions);
        let l = average_cost(&stationary.r, &state_costs, cfg.pmf())?;
        Ok(Policy {
            config: cfg.clone(),
            decisions,
            transition,
            r: stationary.r,
            state_costs,
            average_cost: l,
            gain,
            eps,
            solver: SolverMeta {
                multichain: stationary.recurrent_classes > 1,
                ..solver
            },
        })
    }

    /// Serve every request on demand and keep the buffer where it is.
    pub fn on_demand(cfg: &SystemConfig) -> Result<Policy> {
        let decisions = (0..cfg.levels())
            .map(|b| {
                let targets = vec![b; cfg.max_request() + 1];
                DecisionMatrix::deterministic(b, cfg.levels(), &targets)
            })
            .collect();
        let meta = SolverMeta {
            space: StateSpace::Degenerated,
            method: BellmanMethod::ExactRowwise,
            iterations: 0,
            multichain: false,
        };
        let mut policy = Policy::assemble(cfg, decisions, f64::NAN, 0.0, meta)?;
        policy.gain = policy.average_cost;
        Ok(policy)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("policy serializes")
    }

    /// Parses a policy and checks that its decisions fit its configuration.
    pub fn from_json(text: &str) -> Result<Policy> {
        let policy: Policy = serde_json::from_str(text)?;
        check_decisions(&policy.config, &policy.decisions)?;
        Ok(policy)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Policy> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn check_decisions(cfg: &SystemConfig, decisions: &[DecisionMatrix]) -> Result<()> {
    if decisions.len() != cfg.levels() {
        return Err(Error::DimensionMismatch(format!(
            "{} decision matrices for {} buffer levels",
            decisions.len(),
            cfg.levels()
        )));
    }
    for (b, d) in decisions.iter().enumerate() {
        if d.level() != b || d.num_requests() != cfg.max_request() + 1 || d.num_levels() != cfg.levels() {
            return Err(Error::DimensionMismatch(format!(
                "decision matrix #{b} (level {}) is {}x{}, expected {}x{}",
                d.level(),
                d.num_requests(),
                d.num_levels(),
                cfg.max_request() + 1,
                cfg.levels()
            )));
        }
        DecisionMatrix::new(b, d.rows().to_vec())?;
        if d.zero_pattern_excess() > 1e-9 {
            return Err(Error::Infeasible(format!(
                "decisions at level {b} require negative transmissions"
            )));
        }
    }
    Ok(())
}

/// Row `b` is the `p`-mixture of the rows of `D^b`.
pub fn build_transition_matrix(decisions: &[DecisionMatrix], p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut a = Vec::with_capacity(decisions.len());
    for (b, d) in decisions.iter().enumerate() {
        if d.level() != b {
            return Err(Error::DimensionMismatch(format!(
                "decision for level {b} missing (found level {})",
                d.level()
            )));
        }
        if d.num_requests() != p.len() {
            return Err(Error::DimensionMismatch(format!(
                "decision at level {b} has {} rows for {} request values",
                d.num_requests(),
                p.len()
            )));
        }
        a.push(d.marginal(p));
    }
    Ok(a)
}

/// `Omega[b][x]`, the expected energy of each state under the decisions.
pub fn state_cost_matrix(cfg: &SystemConfig, decisions: &[DecisionMatrix]) -> Vec<Vec<f64>> {
    let powers = cfg.powers();
    decisions
        .iter()
        .enumerate()
        .map(|(b, d)| {
            d.rows()
                .iter()
                .enumerate()
                .map(|(x, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, w)| **w != 0.0)
                        .map(|(n, w)| w * powers.transition(x, n, b))
                        .sum::<f64>()
                        - 1.0
                })
                .collect()
        })
        .collect()
}

/// Recomputes `r' Omega p` for a policy from its decisions.
pub fn policy_average_cost(policy: &Policy, cfg: &SystemConfig) -> Result<f64> {
    check_decisions(cfg, &policy.decisions)?;
    let a = build_transition_matrix(&policy.decisions, cfg.pmf())?;
    let stationary = stationary_distribution(&a)?;
    let omega = state_cost_matrix(cfg, &policy.decisions);
    average_cost(&stationary.r, &omega, cfg.pmf())
}

struct SweepStats {
    span: f64,
    gain: f64,
}

/// Subtracts `next[0]`, measures the differences against `prev`, and swaps.
fn renormalize(prev: &mut Vec<f64>, next: &mut Vec<f64>) -> SweepStats {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (p, n) in prev.iter().zip(next.iter()) {
        let d = n - p;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let shift = next[0];
    next.iter_mut().for_each(|x| *x -= shift);
    std::mem::swap(prev, next);
    SweepStats {
        span: hi - lo,
        gain: 0.5 * (hi + lo),
    }
}

/// Value iteration over buffer levels.
pub fn value_iterate_degenerated(cfg: &SystemConfig, opts: &ViOptions) -> Result<(Policy, ViReport)> {
    opts.validate()?;
    let levels = cfg.levels();
    let powers = cfg.powers();
    let method = opts.solver.method;
    let mut marginal = match method {
        BellmanMethod::ConvexMarginal => Some(MarginalSolver::new(cfg, opts.solver)?),
        BellmanMethod::ExactRowwise => None,
    };

    let started = Instant::now();
    let mut values = ValueVector::zeros(levels);
    let mut next = vec![0.0; levels];
    let mut targets = vec![vec![0usize; cfg.max_request() + 1]; levels];
    let mut decisions: Vec<Option<DecisionMatrix>> = vec![None; levels];
    let mut trace = Vec::new();
    let mut stats = SweepStats {
        span: f64::INFINITY,
        gain: f64::NAN,
    };
    while stats.span >= opts.eps {
        if values.t >= opts.max_sweeps {
            return Err(Error::NotConverged {
                method: "degenerated value iteration",
                iterations: values.t,
                span: stats.span,
            });
        }
        for b in 0..levels {
            next[b] = match marginal.as_mut() {
                None => rowwise_targets(b, cfg, &powers, &values.v, &mut targets[b]),
                Some(solver) => {
                    let step = solver.solve(b, &values.v)?;
                    decisions[b] = Some(step.d_star);
                    step.value
                }
            };
        }
        stats = renormalize(&mut values.v, &mut next);
        values.t += 1;
        trace.push(stats.gain);
    }
    let iterate_ms = started.elapsed().as_secs_f64() * 1e3;

    let started = Instant::now();
    let decisions: Vec<DecisionMatrix> = match method {
        BellmanMethod::ExactRowwise => targets
            .iter()
            .enumerate()
            .map(|(b, t)| DecisionMatrix::deterministic(b, levels, t))
            .collect(),
        BellmanMethod::ConvexMarginal => decisions.into_iter().map(|d| d.expect("every level solved")).collect(),
    };
    let meta = SolverMeta {
        space: StateSpace::Degenerated,
        method,
        iterations: values.t,
        multichain: false,
    };
    let policy = Policy::assemble(cfg, decisions, stats.gain, opts.eps, meta)?;
    let report = ViReport {
        iterations: values.t,
        final_span: stats.span,
        wallclock: PhaseTimes {
            iterate_ms,
            assemble_ms: started.elapsed().as_secs_f64() * 1e3,
        },
        method,
        space: StateSpace::Degenerated,
        gain_trace: trace,
    };
    Ok((policy, report))
}

/// Conventional value iteration over all `(b, x)` states with integer
/// transmissions. Each action's continuation is the expectation over the
/// next request, evaluated directly.
pub fn value_iterate_full(cfg: &SystemConfig, opts: &ViOptions) -> Result<(Policy, ViReport)> {
    opts.validate()?;
    let levels = cfg.levels();
    let requests = cfg.max_request() + 1;
    let top = cfg.buffer_size();
    let p = cfg.pmf();
    let eta = cfg.eta();
    let energy: Vec<f64> = (0..=top + cfg.max_request()).map(|y| eta.powi(y as i32) - 1.0).collect();
    let idx = |b: usize, x: usize| b * requests + x;

    let started = Instant::now();
    let mut values = vec![0.0; levels * requests];
    let mut next = vec![0.0; levels * requests];
    let mut choice = vec![0usize; levels * requests];
    let mut sweeps = 0;
    let mut trace = Vec::new();
    let mut stats = SweepStats {
        span: f64::INFINITY,
        gain: f64::NAN,
    };
    while stats.span >= opts.eps {
        if sweeps >= opts.max_sweeps {
            return Err(Error::NotConverged {
                method: "full-space value iteration",
                iterations: sweeps,
                span: stats.span,
            });
        }
        for b in 0..levels {
            for x in 0..requests {
                let mut best = f64::INFINITY;
                let mut best_n = 0;
                for y in x.saturating_sub(b)..=top - b + x {
                    let n = b + y - x;
                    let mut cont = 0.0;
                    for (x_next, px) in p.iter().enumerate() {
                        cont += px * values[idx(n, x_next)];
                    }
                    let q = energy[y] + cont;
                    if q < best {
                        best = q;
                        best_n = n;
                    }
                }
                next[idx(b, x)] = best;
                choice[idx(b, x)] = best_n;
            }
        }
        stats = renormalize(&mut values, &mut next);
        sweeps += 1;
        trace.push(stats.gain);
    }
    let iterate_ms = started.elapsed().as_secs_f64() * 1e3;

    let started = Instant::now();
    let decisions = (0..levels)
        .map(|b| DecisionMatrix::deterministic(b, levels, &choice[b * requests..(b + 1) * requests]))
        .collect();
    let meta = SolverMeta {
        space: StateSpace::Full,
        method: BellmanMethod::ExactRowwise,
        iterations: sweeps,
        multichain: false,
    };
    let policy = Policy::assemble(cfg, decisions, stats.gain, opts.eps, meta)?;
    let report = ViReport {
        iterations: sweeps,
        final_span: stats.span,
        wallclock: PhaseTimes {
            iterate_ms,
            assemble_ms: started.elapsed().as_secs_f64() * 1e3,
        },
        method: BellmanMethod::ExactRowwise,
        space: StateSpace::Full,
        gain_trace: trace,
    };
    Ok((policy, report))
}
