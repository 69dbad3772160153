//! Reference linear programs over the full decision matrix.
//!
//! These solve the same problems as the staircase fill and the row-wise
//! Bellman step, but through a general simplex solver over every entry of
//! `D`. They exist to cross-check the fast paths and are used by the
//! validation suites.

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};

use crate::error::{Error, Result};
use crate::fast::{DecisionMatrix, MarginalVector};
use crate::model::SystemConfig;

struct DecisionLp {
    problem: Problem,
    vars: Vec<Vec<Option<Variable>>>,
}

/// Variables for every cell with `m + n >= b`; unit row sums.
fn decision_lp(cfg: &SystemConfig, b: usize, extra_cost: &[f64]) -> DecisionLp {
    let p = cfg.pmf();
    let levels = cfg.levels();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut vars = vec![vec![None; levels]; p.len()];
    for (m, row) in vars.iter_mut().enumerate() {
        for (n, slot) in row.iter_mut().enumerate().skip(b.saturating_sub(m)) {
            let c = cfg.eta().powi(m as i32 + n as i32 - b as i32) + extra_cost[n];
            *slot = Some(problem.add_var(p[m] * c, (0.0, f64::INFINITY)));
        }
    }
    for row in &vars {
        let expr: Vec<(Variable, f64)> = row.iter().flatten().map(|v| (*v, 1.0)).collect();
        problem.add_constraint(&expr[..], ComparisonOp::Eq, 1.0);
    }
    DecisionLp { problem, vars }
}

fn extract(b: usize, vars: &[Vec<Option<Variable>>], sol: &minilp::Solution) -> DecisionMatrix {
    let rows = vars
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.map_or(0.0, |v| sol[v].max(0.0)))
                .collect()
        })
        .collect();
    DecisionMatrix::from_rows_unchecked(b, rows)
}

/// Minimum expected energy at level `a.level()` over decisions with marginal `a`.
pub fn assignment_lp(cfg: &SystemConfig, a: &MarginalVector) -> Result<(f64, DecisionMatrix)> {
    let b = a.level();
    let p = cfg.pmf();
    let zeros = vec![0.0; cfg.levels()];
    let DecisionLp { mut problem, vars } = decision_lp(cfg, b, &zeros);
    for (n, an) in a.as_slice().iter().enumerate() {
        let expr: Vec<(Variable, f64)> = vars
            .iter()
            .enumerate()
            .filter_map(|(m, row)| row[n].map(|v| (v, p[m])))
            .filter(|(_, w)| *w > 0.0)
            .collect();
        if expr.is_empty() {
            if *an > 0.0 {
                return Err(Error::Infeasible(format!("no request can reach level {n}")));
            }
            continue;
        }
        problem.add_constraint(&expr[..], ComparisonOp::Eq, *an);
    }
    let sol = problem.solve().map_err(lp_error)?;
    Ok((sol.objective() - 1.0, extract(b, &vars, &sol)))
}

/// Minimum of `sum_m p_m sum_n D(m, n) (eta^(m + n - b) + v_n) - 1` over all
/// feasible decisions at level `b`.
pub fn joint_bellman_lp(cfg: &SystemConfig, b: usize, v: &[f64]) -> Result<(f64, DecisionMatrix)> {
    let DecisionLp { problem, vars } = decision_lp(cfg, b, v);
    let sol = problem.solve().map_err(lp_error)?;
    Ok((sol.objective() - 1.0, extract(b, &vars, &sol)))
}

fn lp_error(e: minilp::Error) -> Error {
    match e {
        minilp::Error::Infeasible => Error::Infeasible("linear program has no feasible point".into()),
        other => Error::Lp(other.to_string()),
    }
}
