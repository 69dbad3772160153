//! Cross-checks of every solver against an independent one.
//!
//! Each suite draws its instances from its own seeded generator, so a run is
//! reproducible from the seed alone. The first failing instance of a suite
//! is written as JSON to the output directory, when one is given.

use std::fmt;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::random::{random_config, random_feasible_marginal, random_values};
use crate::baselines::{taut_string_schedule, Trace};
use crate::bellman::{bellman_convex_marginal, bellman_exact_rowwise, BellmanMethod, SolverOptions};
use crate::error::{Error, Result};
use crate::fast::{
    fast_assign, is_generalized_monotone, marginal_feasible, per_level_caps_hold, DecisionMatrix,
    MarginalVector, StripeSupport, MONOTONE_TOLERANCE,
};
use crate::model::SystemConfig;
use crate::oracle::{assignment_lp, joint_bellman_lp};
use crate::sim::{simulate_on_requests, simulate_policy};
use crate::value_iteration::{value_iterate_degenerated, value_iterate_full, ViOptions};

/// The assignment routine under test.
pub type Assigner = fn(&[f64], &MarginalVector) -> Result<(DecisionMatrix, StripeSupport)>;

pub const SUITES: [&str; 8] = [
    "fast-vs-lp",
    "monotonicity",
    "convexity",
    "hall-counterexample",
    "bellman-agreement",
    "vi-agreement",
    "simulator-consistency",
    "taut-dominance",
];

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Directory for reproducer files; nothing is written when `None`.
    pub out_dir: Option<PathBuf>,
    pub assigner: Assigner,
    /// Run a tenth of the instances.
    pub quick: bool,
}

impl ValidateOptions {
    pub fn new(seed: u64) -> Self {
        ValidateOptions {
            seed,
            out_dir: None,
            assigner: fast_assign,
            quick: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
    pub reproducer: Option<PathBuf>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationSummary {
    pub seed: u64,
    pub suites: Vec<SuiteOutcome>,
}

impl ValidationSummary {
    pub fn all_passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteOutcome> {
        self.suites.iter().find(|s| s.name == name)
    }
}

impl fmt::Display for ValidationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "validation seed {}", self.seed)?;
        for s in &self.suites {
            let verdict = if s.passed() { "PASS" } else { "FAIL" };
            write!(f, "{verdict} {:<22} {}/{} instances", s.name, s.checked - s.failed, s.checked)?;
            if let Some(msg) = &s.first_failure {
                write!(f, "; first failure: {msg}")?;
            }
            if let Some(path) = &s.reproducer {
                write!(f, " (reproducer {})", path.display())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A check that either passes or explains the failure together with the
/// instance that triggered it.
type Check = std::result::Result<(), (String, serde_json::Value)>;

struct Suite<'a> {
    name: &'static str,
    opts: &'a ValidateOptions,
    rng: ChaCha8Rng,
    outcome: SuiteOutcome,
}

impl<'a> Suite<'a> {
    fn new(index: usize, opts: &'a ValidateOptions) -> Self {
        let name = SUITES[index];
        Suite {
            name,
            opts,
            rng: ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(31).wrapping_add(index as u64)),
            outcome: SuiteOutcome {
                name,
                checked: 0,
                failed: 0,
                first_failure: None,
                reproducer: None,
            },
        }
    }

    fn count(&self, full: usize) -> usize {
        if self.opts.quick {
            (full / 10).max(1)
        } else {
            full
        }
    }

    fn record(&mut self, check: Check) -> std::io::Result<()> {
        self.outcome.checked += 1;
        if let Err((msg, instance)) = check {
            self.outcome.failed += 1;
            if self.outcome.first_failure.is_none() {
                self.outcome.first_failure = Some(msg.clone());
                if let Some(dir) = &self.opts.out_dir {
                    self.outcome.reproducer = Some(write_reproducer(dir, self.name, self.opts.seed, &msg, instance)?);
                }
            }
        }
        Ok(())
    }
}

fn write_reproducer(dir: &Path, suite: &str, seed: u64, msg: &str, instance: serde_json::Value) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{suite}.json"));
    let doc = json!({ "suite": suite, "seed": seed, "failure": msg, "instance": instance });
    std::fs::write(&path, serde_json::to_string_pretty(&doc).expect("json"))?;
    Ok(path)
}

fn cfg_json(cfg: &SystemConfig) -> serde_json::Value {
    serde_json::from_str(&cfg.to_json()).expect("config json")
}

fn fail<T: Into<String>>(msg: T, instance: serde_json::Value) -> Check {
    Err((msg.into(), instance))
}

/// Runs all suites. Errors only on I/O trouble with the reproducer files.
pub fn run_validation(opts: &ValidateOptions) -> Result<ValidationSummary> {
    let runners: [fn(&mut Suite) -> std::io::Result<()>; 8] = [
        fast_vs_lp,
        monotonicity,
        convexity,
        hall_counterexample,
        bellman_agreement,
        vi_agreement,
        simulator_consistency,
        taut_dominance,
    ];
    let mut suites = Vec::with_capacity(runners.len());
    for (i, run) in runners.iter().enumerate() {
        let mut suite = Suite::new(i, opts);
        run(&mut suite).map_err(Error::Io)?;
        suites.push(suite.outcome);
    }
    Ok(ValidationSummary { seed: opts.seed, suites })
}

/// Value of the assigner's decisions, after checking that they are a valid
/// realization of `a`.
fn assigned_cost(assigner: Assigner, cfg: &SystemConfig, a: &MarginalVector) -> std::result::Result<(f64, DecisionMatrix, StripeSupport), String> {
    let p = cfg.pmf();
    let (d, stripe) = assigner(p, a).map_err(|e| format!("assigner failed: {e}"))?;
    if d.num_requests() != p.len() || d.num_levels() != a.as_slice().len() {
        return Err("assignment has the wrong shape".into());
    }
    for (m, row) in d.rows().iter().enumerate() {
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > 1e-9 || row.iter().any(|v| *v < -1e-12) {
            return Err(format!("row {m} is not a distribution"));
        }
    }
    let got = d.marginal(p);
    let gap = got.iter().zip(a.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if gap > 1e-9 {
        return Err(format!("marginal misses its target by {gap:e}"));
    }
    let leak = d.zero_pattern_mass(p);
    if leak > 1e-9 {
        return Err(format!("mass {leak:e} in a cell with m + n < b"));
    }
    Ok((d.expected_cost(p, cfg.eta()), d, stripe))
}

fn fast_vs_lp(s: &mut Suite) -> std::io::Result<()> {
    for _ in 0..s.count(300) {
        let cfg = random_config(&mut s.rng, 6, 6);
        let b = s.rng.gen_range(0..cfg.levels());
        let a = random_feasible_marginal(&mut s.rng, &cfg, b);
        let inst = json!({ "config": cfg_json(&cfg), "b": b, "a": a.as_slice() });
        let check = match (assigned_cost(s.opts.assigner, &cfg, &a), assignment_lp(&cfg, &a)) {
            (Err(msg), _) => fail(msg, inst),
            (_, Err(e)) => fail(format!("LP failed: {e}"), inst),
            (Ok((h, ..)), Ok((lp, _))) if (h - lp).abs() > 1e-9 * (1.0 + lp.abs()) => {
                fail(format!("greedy cost {h} vs LP {lp}"), inst)
            }
            _ => Ok(()),
        };
        s.record(check)?;
    }
    Ok(())
}

fn monotonicity(s: &mut Suite) -> std::io::Result<()> {
    for _ in 0..s.count(300) {
        let cfg = random_config(&mut s.rng, 6, 6);
        let b = s.rng.gen_range(0..cfg.levels());
        let a = random_feasible_marginal(&mut s.rng, &cfg, b);
        let inst = json!({ "config": cfg_json(&cfg), "b": b, "a": a.as_slice() });
        let check = match assigned_cost(s.opts.assigner, &cfg, &a) {
            Err(msg) => fail(msg, inst),
            Ok((_, d, stripe)) => {
                if !is_generalized_monotone(&d, MONOTONE_TOLERANCE) {
                    fail("decisions are not generalized monotone", inst)
                } else if !stripe.is_staircase() {
                    fail("support is not a staircase", inst)
                } else if stripe.len() > cfg.max_request() + cfg.levels() {
                    fail(format!("{} cells visited, more than X + B + 1", stripe.len()), inst)
                } else {
                    Ok(())
                }
            }
        };
        s.record(check)?;
    }
    Ok(())
}

fn convexity(s: &mut Suite) -> std::io::Result<()> {
    for _ in 0..s.count(300) {
        let cfg = random_config(&mut s.rng, 6, 6);
        let b = s.rng.gen_range(0..cfg.levels());
        let a1 = random_feasible_marginal(&mut s.rng, &cfg, b);
        let a2 = random_feasible_marginal(&mut s.rng, &cfg, b);
        let lambda: f64 = s.rng.gen();
        let mix: Vec<f64> = a1
            .as_slice()
            .iter()
            .zip(a2.as_slice())
            .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
            .collect();
        let total: f64 = mix.iter().sum();
        let mix = MarginalVector::new(b, mix.iter().map(|v| v / total).collect()).expect("mixture is a pmf");
        let inst = json!({
            "config": cfg_json(&cfg), "b": b, "a1": a1.as_slice(), "a2": a2.as_slice(), "lambda": lambda
        });
        let check = match (
            assigned_cost(s.opts.assigner, &cfg, &a1),
            assigned_cost(s.opts.assigner, &cfg, &a2),
            assigned_cost(s.opts.assigner, &cfg, &mix),
        ) {
            (Ok((h1, ..)), Ok((h2, ..)), Ok((hm, ..))) => {
                let chord = lambda * h1 + (1.0 - lambda) * h2;
                if hm > chord + 1e-9 * (1.0 + chord.abs()) {
                    fail(format!("h at the mixture {hm} exceeds the chord {chord}"), inst)
                } else {
                    Ok(())
                }
            }
            (Err(m), ..) | (_, Err(m), _) | (.., Err(m)) => fail(m, inst),
        };
        s.record(check)?;
    }
    Ok(())
}

fn hall_counterexample(s: &mut Suite) -> std::io::Result<()> {
    // Every a_k fits under its own cap, but the first three levels together
    // need 0.75 of the mass while only requests of 1 or 2 (0.5) can reach them.
    let cfg = SystemConfig::new(3, 2.0, vec![0.5, 0.25, 0.25]).expect("valid");
    let a = vec![0.0, 0.25, 0.5, 0.25];
    let inst = json!({ "config": cfg_json(&cfg), "b": 3, "a": a });
    let p = cfg.pmf();
    let check = if !per_level_caps_hold(3, p, &a) {
        fail("per-level caps should hold", inst)
    } else if marginal_feasible(3, p, &a) {
        fail("cumulative test accepted an unrealizable marginal", inst)
    } else if assignment_lp(&cfg, &MarginalVector::new(3, a.clone()).expect("pmf")).is_ok() {
        fail("LP found a realization", inst)
    } else {
        let mv = MarginalVector::new(3, a.clone()).expect("pmf");
        match (s.opts.assigner)(p, &mv) {
            Ok((d, _)) if d.zero_pattern_mass(p) <= 1e-9 && (d.marginal(p)[2] - 0.5).abs() <= 1e-9 => {
                fail("assigner realized an infeasible marginal without a forbidden cell", inst)
            }
            _ => Ok(()),
        }
    };
    s.record(check)?;

    // A feasible neighbour with the same per-level profile is accepted.
    let ok = vec![0.0, 0.25, 0.25, 0.5];
    let inst = json!({ "config": cfg_json(&cfg), "b": 3, "a": ok });
    let check = if marginal_feasible(3, p, &ok) {
        let mv = MarginalVector::new(3, ok).expect("pmf");
        match assigned_cost(s.opts.assigner, &cfg, &mv) {
            Ok(_) => Ok(()),
            Err(m) => fail(m, inst),
        }
    } else {
        fail("cumulative test rejected a realizable marginal", inst)
    };
    s.record(check)
}

fn bellman_agreement(s: &mut Suite) -> std::io::Result<()> {
    for _ in 0..s.count(60) {
        let cfg = random_config(&mut s.rng, 5, 5);
        let b = s.rng.gen_range(0..cfg.levels());
        let v = random_values(&mut s.rng, cfg.levels());
        let inst = json!({ "config": cfg_json(&cfg), "b": b, "v": v });
        let exact = bellman_exact_rowwise(b, &cfg, &v);
        let opts = SolverOptions::with_method(BellmanMethod::ConvexMarginal);
        let check = match (bellman_convex_marginal(b, &cfg, &v, &opts), joint_bellman_lp(&cfg, b, &v)) {
            (Err(e), _) => fail(format!("marginal solver failed: {e}"), inst),
            (_, Err(e)) => fail(format!("LP failed: {e}"), inst),
            (Ok(cm), Ok((lp, _))) => {
                let tol = 1e-6 * (1.0 + lp.abs());
                if (exact.value - lp).abs() > tol {
                    fail(format!("row-wise value {} vs LP {lp}", exact.value), inst)
                } else if (cm.value - lp).abs() > tol {
                    fail(format!("marginal-space value {} vs LP {lp}", cm.value), inst)
                } else {
                    Ok(())
                }
            }
        };
        s.record(check)?;
    }
    Ok(())
}

fn vi_agreement(s: &mut Suite) -> std::io::Result<()> {
    for i in 0..s.count(30) {
        let cfg = random_config(&mut s.rng, 4, 4);
        let inst = json!({ "config": cfg_json(&cfg) });
        let opts = ViOptions::with_eps(1e-9);
        let check = match (value_iterate_degenerated(&cfg, &opts), value_iterate_full(&cfg, &opts)) {
            (Ok((deg, _)), Ok((full, _))) => {
                if (deg.average_cost - full.average_cost).abs() > 1e-6 {
                    fail(format!("buffer-level cost {} vs full-state cost {}", deg.average_cost, full.average_cost), inst)
                } else if i % 3 == 0 {
                    match value_iterate_degenerated(&cfg, &opts.method(BellmanMethod::ConvexMarginal)) {
                        Ok((cm, _)) if (cm.average_cost - deg.average_cost).abs() > 1e-6 => {
                            fail(format!("marginal-space cost {} vs {}", cm.average_cost, deg.average_cost), inst)
                        }
                        Ok(_) => Ok(()),
                        Err(e) => fail(format!("marginal-space iteration failed: {e}"), inst),
                    }
                } else {
                    Ok(())
                }
            }
            (Err(e), _) | (_, Err(e)) => fail(format!("value iteration failed: {e}"), inst),
        };
        s.record(check)?;
    }
    Ok(())
}

fn simulator_consistency(s: &mut Suite) -> std::io::Result<()> {
    let steps = if s.opts.quick { 50_000 } else { 200_000 };
    for _ in 0..s.count(8) {
        let cfg = random_config(&mut s.rng, 5, 6);
        let seed: u64 = s.rng.gen();
        let inst = json!({ "config": cfg_json(&cfg), "sim_seed": seed, "steps": steps });
        let check = match value_iterate_degenerated(&cfg, &ViOptions::with_eps(1e-9)) {
            Err(e) => fail(format!("value iteration failed: {e}"), inst),
            Ok((policy, _)) => match simulate_policy(&policy, steps, seed, 0) {
                Err(e) => fail(format!("simulation failed: {e}"), inst),
                Ok(rep) => {
                    let l = policy.average_cost;
                    let tol = (0.02 * l).max(4.0 * rep.std_error) + 1e-9;
                    if (rep.mean_energy - l).abs() > tol {
                        fail(format!("empirical {} vs analytic {l}", rep.mean_energy), inst)
                    } else {
                        Ok(())
                    }
                }
            },
        };
        s.record(check)?;
    }
    Ok(())
}

fn taut_dominance(s: &mut Suite) -> std::io::Result<()> {
    for _ in 0..s.count(20) {
        let cfg = random_config(&mut s.rng, 5, 6);
        let trace = Trace::sample(&cfg, 2_000, s.rng.gen());
        let sim_seed: u64 = s.rng.gen();
        let inst = json!({ "config": cfg_json(&cfg), "requests": trace.requests, "sim_seed": sim_seed });
        let check = match value_iterate_degenerated(&cfg, &ViOptions::with_eps(1e-8)) {
            Err(e) => fail(format!("value iteration failed: {e}"), inst),
            Ok((policy, _)) => match (
                simulate_on_requests(&policy, &trace.requests, sim_seed, 0),
                taut_string_schedule(&trace, cfg.buffer_size(), cfg.eta(), 0),
            ) {
                (Err(e), _) => fail(format!("simulation failed: {e}"), inst),
                (_, Err(e)) => fail(format!("offline schedule failed: {e}"), inst),
                (Ok(rep), Ok(sched)) => {
                    let off = sched.mean_energy();
                    if off > rep.mean_energy + 1e-9 * (1.0 + rep.mean_energy) {
                        fail(format!("offline {off} above the causal policy's {}", rep.mean_energy), inst)
                    } else {
                        Ok(())
                    }
                }
            },
        };
        s.record(check)?;
    }
    Ok(())
}
