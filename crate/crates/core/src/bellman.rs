//! One Bellman step for a single buffer level.
//!
//! Given continuation values `v`, the step at level `b` minimizes
//! `h(a) + a' v` over realizable marginals `a`. Two solvers are provided:
//!
//! * [`bellman_exact_rowwise`] substitutes `a = D' p`. The objective becomes
//!   `sum_m p_m sum_n D(m, n) (eta^(m + n - b) + v_n) - 1`, linear in `D`
//!   and separable by row, so each request row picks its cheapest next level.
//! * [`bellman_convex_marginal`] works in marginal space with `h` and its
//!   subgradient only, using a cutting-plane model of `h` over the
//!   prefix-capped simplex. It certifies its answer with a lower bound from
//!   the model.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fast::{evaluate_h_relaxed, prefix_caps, DecisionMatrix, MarginalVector};
use crate::model::{PowerTable, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellmanMethod {
    #[default]
    ExactRowwise,
    ConvexMarginal,
}

impl BellmanMethod {
    pub fn name(self) -> &'static str {
        match self {
            BellmanMethod::ExactRowwise => "exact-rowwise",
            BellmanMethod::ConvexMarginal => "convex-marginal",
        }
    }
}

impl std::str::FromStr for BellmanMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-rowwise" => Ok(BellmanMethod::ExactRowwise),
            "convex-marginal" => Ok(BellmanMethod::ConvexMarginal),
            other => Err(Error::InvalidArgument(format!("unknown Bellman method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub method: BellmanMethod,
    /// Cutting-plane iterations per Bellman step (convex-marginal only).
    pub max_iters: usize,
    /// Certified optimality gap at which a convex-marginal step stops.
    pub inner_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            method: BellmanMethod::ExactRowwise,
            max_iters: 10_000,
            inner_tol: 1e-8,
        }
    }
}

impl SolverOptions {
    pub fn with_method(method: BellmanMethod) -> Self {
        SolverOptions {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner_tol > 0.0) || self.max_iters == 0 {
            return Err(Error::InvalidArgument(
                "inner_tol must be positive and max_iters at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BellmanResult {
    pub level: usize,
    pub value: f64,
    pub a_star: MarginalVector,
    pub d_star: DecisionMatrix,
}

/// Exact Bellman step at level `b`; ties go to the smaller next level.
pub fn bellman_exact_rowwise(b: usize, cfg: &SystemConfig, v_prev: &[f64]) -> BellmanResult {
    let powers = cfg.powers();
    let mut targets = vec![0; cfg.max_request() + 1];
    let value = rowwise_targets(b, cfg, &powers, v_prev, &mut targets);
    let d_star = DecisionMatrix::deterministic(b, cfg.levels(), &targets);
    let a_star = MarginalVector::from_parts_unchecked(b, d_star.marginal(cfg.pmf()));
    BellmanResult {
        level: b,
        value,
        a_star,
        d_star,
    }
}

/// Fills `targets[m]` with the best next level for request `m` and returns
/// the step value.
pub(crate) fn rowwise_targets(
    b: usize,
    cfg: &SystemConfig,
    powers: &PowerTable,
    v: &[f64],
    targets: &mut [usize],
) -> f64 {
    let top = cfg.buffer_size();
    let mut value = -1.0;
    for (m, (target, pm)) in targets.iter_mut().zip(cfg.pmf()).enumerate() {
        let lo = b.saturating_sub(m);
        let mut best_n = lo;
        let mut best = powers.transition(m, lo, b) + v[lo];
        for n in lo + 1..=top {
            let q = powers.transition(m, n, b) + v[n];
            if q < best {
                best = q;
                best_n = n;
            }
        }
        *target = best_n;
        value += pm * best;
    }
    value
}

/// Marginal-space Bellman step at level `b` with a fresh cut pool.
pub fn bellman_convex_marginal(
    b: usize,
    cfg: &SystemConfig,
    v_prev: &[f64],
    opts: &SolverOptions,
) -> Result<BellmanResult> {
    MarginalSolver::new(cfg, *opts)?.solve(b, v_prev)
}

/// Supporting hyperplane `h(a) >= intercept + slope' a`.
#[derive(Debug, Clone)]
struct Cut {
    slope: Vec<f64>,
    intercept: f64,
}

impl Cut {
    fn same_as(&self, other: &Cut) -> bool {
        (self.intercept - other.intercept).abs() <= 1e-12
            && self
                .slope
                .iter()
                .zip(&other.slope)
                .all(|(x, y)| (x - y).abs() <= 1e-12)
    }
}

/// Cutting-plane solver for the marginal-space step.
///
/// `h` does not depend on the continuation values, so the cuts collected for
/// a level stay valid across value-iteration sweeps and are reused.
pub struct MarginalSolver<'a> {
    cfg: &'a SystemConfig,
    opts: SolverOptions,
    pools: Vec<Vec<Cut>>,
}

impl<'a> MarginalSolver<'a> {
    pub fn new(cfg: &'a SystemConfig, opts: SolverOptions) -> Result<Self> {
        opts.validate()?;
        Ok(MarginalSolver {
            cfg,
            opts,
            pools: vec![Vec::new(); cfg.levels()],
        })
    }

    pub fn cut_count(&self, b: usize) -> usize {
        self.pools[b].len()
    }

    pub fn solve(&mut self, b: usize, v: &[f64]) -> Result<BellmanResult> {
        let cfg = self.cfg;
        let levels = cfg.levels();
        if v.len() != levels {
            return Err(Error::DimensionMismatch(format!(
                "{} continuation values for {levels} levels",
                v.len()
            )));
        }
        let mut best: Option<(f64, MarginalVector, DecisionMatrix)> = None;
        if self.pools[b].is_empty() {
            let start = MarginalVector::point_mass(b, levels, levels - 1);
            let (f, cut, d) = self.probe(&start, v)?;
            self.pools[b].push(cut);
            best = Some((f, start, d));
        }

        let caps = prefix_caps(b, cfg.pmf());
        let mut problem = Problem::new(OptimizationDirection::Minimize);
        let a_vars: Vec<Variable> = v.iter().map(|vn| problem.add_var(*vn, (0.0, f64::INFINITY))).collect();
        let t = problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
        let all: Vec<(Variable, f64)> = a_vars.iter().map(|x| (*x, 1.0)).collect();
        problem.add_constraint(&all[..], ComparisonOp::Eq, 1.0);
        for (k, cap) in caps.iter().enumerate() {
            problem.add_constraint(&all[..=k], ComparisonOp::Le, *cap);
        }
        for cut in &self.pools[b] {
            problem.add_constraint(cut_expr(t, &a_vars, cut), ComparisonOp::Ge, cut.intercept);
        }
        let mut sol = problem.solve().map_err(|e| Error::Lp(e.to_string()))?;

        let mut gap = f64::INFINITY;
        for iter in 1..=self.opts.max_iters {
            let lower = sol.objective();
            let a = clean_marginal(b, a_vars.iter().map(|x| sol[*x]));
            let (f, cut, d) = self.probe(&a, v)?;
            if best.as_ref().map_or(true, |(fb, _, _)| f < *fb) {
                best = Some((f, a, d));
            }
            let (fb, ab, db) = best.as_ref().expect("best iterate set");
            gap = fb - lower;
            if gap <= self.opts.inner_tol {
                return Ok(BellmanResult {
                    level: b,
                    value: *fb,
                    a_star: ab.clone(),
                    d_star: db.clone(),
                });
            }
            if self.pools[b].iter().any(|c| c.same_as(&cut)) {
                // The model already contains this piece; the master cannot move.
                return Err(self.stalled(b, iter, best, gap));
            }
            sol = sol
                .add_constraint(cut_expr(t, &a_vars, &cut), ComparisonOp::Ge, cut.intercept)
                .map_err(|e| Error::Lp(e.to_string()))?;
            self.pools[b].push(cut);
        }
        Err(self.stalled(b, self.opts.max_iters, best, gap))
    }

    fn probe(&self, a: &MarginalVector, v: &[f64]) -> Result<(f64, Cut, DecisionMatrix)> {
        let mut eval = evaluate_h_relaxed(self.cfg, a)?;
        eval.decision.project_zero_pattern();
        let lin: f64 = a.as_slice().iter().zip(v).map(|(x, y)| x * y).sum();
        let dot: f64 = a.as_slice().iter().zip(&eval.subgradient).map(|(x, y)| x * y).sum();
        let cut = Cut {
            intercept: eval.value - dot,
            slope: eval.subgradient,
        };
        Ok((eval.value + lin, cut, eval.decision))
    }

    fn stalled(
        &self,
        level: usize,
        iterations: usize,
        best: Option<(f64, MarginalVector, DecisionMatrix)>,
        gap: f64,
    ) -> Error {
        let (value, best) = best.map_or((f64::NAN, Vec::new()), |(f, a, _)| (f, a.into_vec()));
        Error::BellmanNotConverged {
            level,
            iterations,
            best,
            value,
            gap,
        }
    }
}

fn cut_expr(t: Variable, a_vars: &[Variable], cut: &Cut) -> Vec<(Variable, f64)> {
    std::iter::once((t, 1.0))
        .chain(a_vars.iter().zip(&cut.slope).map(|(x, s)| (*x, -s)))
        .collect()
}

fn clean_marginal(b: usize, raw: impl Iterator<Item = f64>) -> MarginalVector {
    let mut a: Vec<f64> = raw.map(|x| x.max(0.0)).collect();
    let total: f64 = a.iter().sum();
    a.iter_mut().for_each(|x| *x /= total);
    MarginalVector::from_parts_unchecked(b, a)
}
