//! Decision matrices for one buffer level and the greedy staircase fill.
//!
//! For a fixed level `b`, a decision matrix `D` has one row per request `m`
//! and one column per next buffer level `n`; row `m` is the distribution of
//! the next level given request `m`. The request pmf `p` weights the rows, so
//! `D' p` is the marginal `a` over next levels.
//!
//! Fixing `a` and minimizing the expected energy over `D` is a transportation
//! problem with cost `eta^(m + n - b)`. That cost is a product of an
//! increasing function of `m` and an increasing function of `n`, so the
//! optimum pairs small requests with high next levels. [`fast_assign`] builds
//! it with one northwest-corner walk from cell `(0, B)`.
//!
//! ## Feasibility
//!
//! Cells with `m + n < b` would need a negative transmission. A marginal `a`
//! can be realized without them iff every prefix of `a` fits the requests
//! that are large enough to reach it:
//!
//! ```text
//! sum_{n <= k} a_n  <=  sum_{x >= b - k} p_x     for k = 0, ..., b - 1
//! ```
//!
//! A bound on each `a_k` alone is not enough; see [`per_level_caps_hold`] and
//! the regression test `per_level_caps_are_not_sufficient`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemConfig;

/// Row sums and marginals are accepted within this distance of their targets.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-10;
/// Remaining row and column masses closer than this take the tie branch.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Default threshold below which an entry counts as zero in the staircase check.
pub const MONOTONE_TOLERANCE: f64 = 1e-9;
/// Mass tolerated in forbidden cells before an assignment is declared infeasible.
pub const ZERO_PATTERN_TOLERANCE: f64 = 1e-9;

/// Randomized decisions of every state sharing buffer level `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    b: usize,
    rows: Vec<Vec<f64>>,
}

impl DecisionMatrix {
    /// Checks non-negativity and unit row sums. The zero pattern is checked
    /// separately by [`DecisionMatrix::zero_pattern_excess`].
    pub fn new(b: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 || b >= width {
            return Err(Error::DimensionMismatch(format!(
                "decision matrix for level {b} has {} rows of width {width}",
                rows.len()
            )));
        }
        for (m, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch(format!("row {m} has length {}", row.len())));
            }
            if row.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::InvalidArgument(format!("row {m} has a negative entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(Error::InvalidArgument(format!("row {m} sums to {total}")));
            }
        }
        Ok(DecisionMatrix { b, rows })
    }

    pub(crate) fn from_rows_unchecked(b: usize, rows: Vec<Vec<f64>>) -> Self {
        DecisionMatrix { b, rows }
    }

    /// Deterministic decisions: request `m` moves to level `targets[m]`.
    pub fn deterministic(b: usize, levels: usize, targets: &[usize]) -> Self {
        let rows = targets
            .iter()
            .map(|&n| {
                let mut row = vec![0.0; levels];
                row[n] = 1.0;
                row
            })
            .collect();
        DecisionMatrix { b, rows }
    }

    pub fn level(&self) -> usize {
        self.b
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.rows[m]
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.rows[m][n]
    }

    pub fn num_requests(&self) -> usize {
        self.rows.len()
    }

    pub fn num_levels(&self) -> usize {
        self.rows[0].len()
    }

    /// `D' p`, the distribution of the next buffer level.
    pub fn marginal(&self, p: &[f64]) -> Vec<f64> {
        let mut a = vec![0.0; self.num_levels()];
        for (row, pm) in self.rows.iter().zip(p) {
            for (an, d) in a.iter_mut().zip(row) {
                *an += pm * d;
            }
        }
        a
    }

    /// Expected energy `sum_m p_m sum_n D(m, n) eta^(m + n - b) - 1`.
    pub fn expected_cost(&self, p: &[f64], eta: f64) -> f64 {
        let mut total = 0.0;
        for (m, (row, pm)) in self.rows.iter().zip(p).enumerate() {
            for (n, d) in row.iter().enumerate() {
                if *d != 0.0 {
                    total += pm * d * eta.powi(m as i32 + n as i32 - self.b as i32);
                }
            }
        }
        total - 1.0
    }

    /// Largest entry sitting in a cell with `m + n < b`.
    pub fn zero_pattern_excess(&self) -> f64 {
        let mut worst = 0.0f64;
        for (m, row) in self.rows.iter().enumerate() {
            for d in row.iter().take(self.b.saturating_sub(m)) {
                worst = worst.max(*d);
            }
        }
        worst
    }

    /// Moves any mass in forbidden cells of a row onto its lowest allowed level.
    pub(crate) fn project_zero_pattern(&mut self) {
        let b = self.b;
        for (m, row) in self.rows.iter_mut().enumerate() {
            let floor = b.saturating_sub(m);
            let moved: f64 = row[..floor].iter().sum();
            if moved > 0.0 {
                row[..floor].iter_mut().for_each(|d| *d = 0.0);
                row[floor] += moved;
            }
        }
    }

    /// Largest `p`-weighted mass in a forbidden cell.
    pub fn zero_pattern_mass(&self, p: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (m, (row, pm)) in self.rows.iter().zip(p).enumerate() {
            for d in row.iter().take(self.b.saturating_sub(m)) {
                worst = worst.max(pm * d);
            }
        }
        worst
    }
}

/// Distribution of the next buffer level from level `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalVector {
    b: usize,
    a: Vec<f64>,
}

impl MarginalVector {
    pub fn new(b: usize, a: Vec<f64>) -> Result<Self> {
        if b >= a.len() {
            return Err(Error::DimensionMismatch(format!(
                "level {b} with a marginal over {} levels",
                a.len()
            )));
        }
        if a.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("marginal has a negative entry".into()));
        }
        let total: f64 = a.iter().sum();
        if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(Error::InvalidArgument(format!("marginal sums to {total}")));
        }
        Ok(MarginalVector { b, a })
    }

    /// All mass on one next level.
    pub fn point_mass(b: usize, levels: usize, n: usize) -> Self {
        let mut a = vec![0.0; levels];
        a[n] = 1.0;
        MarginalVector { b, a }
    }

    pub(crate) fn from_parts_unchecked(b: usize, a: Vec<f64>) -> Self {
        MarginalVector { b, a }
    }

    pub fn level(&self) -> usize {
        self.b
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.a
    }
}

/// One cell of the staircase walked by [`fast_assign`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripeCell {
    pub row: usize,
    pub col: usize,
    /// Probability mass `p_m * D(m, n)` moved through this cell; zero for
    /// cells kept only to connect the staircase.
    pub mass: f64,
}

/// Cells visited by [`fast_assign`], in visiting order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StripeSupport {
    pub cells: Vec<StripeCell>,
}

impl StripeSupport {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Rows never decrease and columns never increase along the walk.
    pub fn is_staircase(&self) -> bool {
        self.cells
            .windows(2)
            .all(|w| w[1].row >= w[0].row && w[1].col <= w[0].col && (w[0].row, w[0].col) != (w[1].row, w[1].col))
    }
}

/// Greedy staircase assignment of request mass `p` onto next-level mass `a`.
///
/// Walks from cell `(0, B)`: the current request row gives mass to the
/// current (highest remaining) column until one of them is exhausted, then
/// advances that index; on a tie both advance. Every visited cell therefore
/// holds `min(remaining row mass, remaining column mass)`.
///
/// Rows with `p_m = 0` carry no weight and are skipped; each gets a point
/// mass at the lowest column of the nearest active row above it (the top
/// column if there is none), raised to `b - m` if needed. This keeps the
/// whole matrix generalized monotone. The level `b` is otherwise unused:
/// whether the result respects the zero pattern is checked by the caller.
pub fn fast_assign(p: &[f64], a: &MarginalVector) -> Result<(DecisionMatrix, StripeSupport)> {
    check_pmf(p, "request pmf")?;
    let a_vec = a.as_slice();
    let levels = a_vec.len();
    let top = levels - 1;
    let b = a.level();

    let active: Vec<usize> = (0..p.len()).filter(|&m| p[m] > 0.0).collect();
    let mut rows = vec![vec![0.0; levels]; p.len()];
    let mut cells: Vec<StripeCell> = Vec::with_capacity(active.len() + levels);

    let mut push = |rows: &mut Vec<Vec<f64>>, m: usize, n: usize, mass: f64| {
        rows[m][n] += mass / p[m];
        match cells.last_mut() {
            Some(last) if last.row == m && last.col == n => last.mass += mass,
            _ => cells.push(StripeCell { row: m, col: n, mass }),
        }
    };

    let mut i = 0;
    let mut n = top as isize;
    let mut u = p[active[0]];
    let mut w = a_vec[top];
    while i < active.len() && n >= 0 {
        let m = active[i];
        let col = n as usize;
        if u < w - TIE_TOLERANCE {
            push(&mut rows, m, col, u);
            w -= u;
            i += 1;
            if i < active.len() {
                u = p[active[i]];
            }
        } else if u > w + TIE_TOLERANCE {
            push(&mut rows, m, col, w);
            u -= w;
            n -= 1;
            if n >= 0 {
                w = a_vec[n as usize];
            }
        } else {
            push(&mut rows, m, col, w);
            // Zero-mass connector keeps the walk a single staircase.
            if i + 1 < active.len() && col > 0 {
                push(&mut rows, m, col - 1, 0.0);
            }
            i += 1;
            n -= 1;
            if i < active.len() {
                u = p[active[i]];
            }
            if n >= 0 {
                w = a_vec[n as usize];
            }
        }
    }

    if i < active.len() {
        // Columns ran out first; only rounding residue is left. Column 0 absorbs it.
        push(&mut rows, active[i], 0, u);
        for &m in &active[i + 1..] {
            push(&mut rows, m, 0, p[m]);
        }
    } else if n >= 0 {
        let last = *active.last().expect("at least one active row");
        for col in (0..=n as usize).rev() {
            push(&mut rows, last, col, 0.0);
        }
    }

    let mut walk_col = top;
    for m in 0..p.len() {
        if p[m] > 0.0 {
            let row = &mut rows[m];
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|d| *d /= total);
            walk_col = row.iter().position(|d| *d > 0.0).unwrap_or(walk_col);
        } else {
            rows[m][walk_col.max(b.saturating_sub(m)).min(top)] = 1.0;
        }
    }

    Ok((
        DecisionMatrix::from_rows_unchecked(b, rows),
        StripeSupport { cells },
    ))
}

/// Optimal expected energy at level `b` among decisions whose marginal is `a`.
pub fn h_value(cfg: &SystemConfig, a: &MarginalVector) -> Result<f64> {
    Ok(evaluate_h(cfg, a)?.value)
}

/// A subgradient of `h` at `a`, defined up to an additive constant.
///
/// These are the column prices of the staircase basis: with row prices
/// `mu_m` and column prices `nu_n`, every staircase cell satisfies
/// `mu_m + p_m nu_n = p_m eta^(m + n - b)`, anchored at `mu = 0` on the first
/// active row. Because the cost is Monge the prices are dual feasible, so
/// `h(a') >= h(a) + nu'(a' - a)` for every feasible `a'`.
pub fn h_subgradient(cfg: &SystemConfig, a: &MarginalVector) -> Result<Vec<f64>> {
    Ok(evaluate_h(cfg, a)?.subgradient)
}

/// `h(a)` together with its subgradient and the optimal decisions.
#[derive(Debug, Clone)]
pub struct HEvaluation {
    pub value: f64,
    pub subgradient: Vec<f64>,
    pub decision: DecisionMatrix,
    pub stripe: StripeSupport,
}

pub fn evaluate_h(cfg: &SystemConfig, a: &MarginalVector) -> Result<HEvaluation> {
    check_dims(cfg, a)?;
    if !marginal_feasible(a.level(), cfg.pmf(), a.as_slice()) {
        return Err(Error::Infeasible(format!(
            "marginal violates the cumulative caps of level {}",
            a.level()
        )));
    }
    evaluate_h_relaxed(cfg, a)
}

/// As [`evaluate_h`] but tolerating marginals that miss the caps by rounding;
/// only mass above [`ZERO_PATTERN_TOLERANCE`] in a forbidden cell is an error.
pub(crate) fn evaluate_h_relaxed(cfg: &SystemConfig, a: &MarginalVector) -> Result<HEvaluation> {
    let p = cfg.pmf();
    let (decision, stripe) = fast_assign(p, a)?;
    let leak = decision.zero_pattern_mass(p);
    if leak > ZERO_PATTERN_TOLERANCE {
        return Err(Error::Infeasible(format!(
            "assignment for level {} needs mass {leak:e} below the buffer floor",
            a.level()
        )));
    }
    let value = decision.expected_cost(p, cfg.eta());
    let subgradient = stripe_prices(cfg, a.level(), &stripe);
    Ok(HEvaluation {
        value,
        subgradient,
        decision,
        stripe,
    })
}

fn stripe_prices(cfg: &SystemConfig, b: usize, stripe: &StripeSupport) -> Vec<f64> {
    let powers = cfg.powers();
    let mut row_price: Vec<Option<f64>> = vec![None; cfg.max_request() + 1];
    let mut col_price: Vec<Option<f64>> = vec![None; cfg.levels()];
    if let Some(first) = stripe.cells.first() {
        row_price[first.row] = Some(0.0);
    }
    for cell in &stripe.cells {
        let c = powers.transition(cell.row, cell.col, b);
        match (row_price[cell.row], col_price[cell.col]) {
            (Some(r), None) => col_price[cell.col] = Some(c - r),
            (None, Some(k)) => row_price[cell.row] = Some(c - k),
            _ => {}
        }
    }
    col_price.into_iter().map(|v| v.unwrap_or(0.0)).collect()
}

/// True iff no positive entry has another positive entry strictly below and
/// to the right of it.
pub fn is_generalized_monotone(d: &DecisionMatrix, tol: f64) -> bool {
    let rows = d.rows();
    let width = d.num_levels();
    // Largest positive column among the rows already scanned (those below).
    let mut below: Option<usize> = None;
    for row in rows.iter().rev() {
        let here = (0..width).rev().find(|&n| row[n] > tol);
        if let (Some(lowest_here), Some(max_below)) = ((0..width).find(|&n| row[n] > tol), below) {
            if max_below > lowest_here {
                return false;
            }
        }
        below = match (below, here) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
    }
    true
}

/// Upper bounds on the prefix sums of a marginal at level `b`:
/// `caps[k] = sum_{x >= b - k} p_x` for `k < b`.
pub fn prefix_caps(b: usize, p: &[f64]) -> Vec<f64> {
    (0..b)
        .map(|k| p.iter().skip(b - k).sum::<f64>())
        .collect()
}

/// Whether `a` is realizable at level `b` without negative transmissions.
pub fn marginal_feasible(b: usize, p: &[f64], a: &[f64]) -> bool {
    let caps = prefix_caps(b.min(a.len()), p);
    let mut prefix = 0.0;
    for (k, cap) in caps.iter().enumerate() {
        prefix += a[k];
        if prefix > cap + TIE_TOLERANCE {
            return false;
        }
    }
    true
}

/// The weaker per-level test `a_k <= sum_{x >= b - k} p_x`. Necessary for
/// feasibility but not sufficient.
pub fn per_level_caps_hold(b: usize, p: &[f64], a: &[f64]) -> bool {
    (0..=b.min(a.len() - 1)).all(|k| a[k] <= p.iter().skip(b - k).sum::<f64>() + TIE_TOLERANCE)
}

fn check_pmf(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() || p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("{what} is not a pmf")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOLERANCE {
        return Err(Error::InvalidArgument(format!("{what} sums to {total}")));
    }
    Ok(())
}

fn check_dims(cfg: &SystemConfig, a: &MarginalVector) -> Result<()> {
    if a.as_slice().len() != cfg.levels() {
        return Err(Error::DimensionMismatch(format!(
            "marginal over {} levels for a buffer of size {}",
            a.as_slice().len(),
            cfg.buffer_size()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rows_close(d: &DecisionMatrix, expected: &[&[f64]]) {
        for (got, want) in d.rows().iter().zip(expected) {
            for (g, w) in got.iter().zip(*want) {
                assert_abs_diff_eq!(g, w, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn two_by_two_anti_diagonal() {
        let a = MarginalVector::new(0, vec![0.5, 0.5]).unwrap();
        let (d, stripe) = fast_assign(&[0.5, 0.5], &a).unwrap();
        rows_close(&d, &[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(stripe.is_staircase());
        assert_eq!(stripe.len(), 3);
    }

    #[test]
    fn hand_trace_with_tie() {
        let a = MarginalVector::new(3, vec![0.0, 0.25, 0.5, 0.25]).unwrap();
        let (d, stripe) = fast_assign(&[0.5, 0.25, 0.25], &a).unwrap();
        rows_close(
            &d,
            &[&[0.0, 0.0, 0.5, 0.5], &[0.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 0.0]],
        );
        assert!(stripe.is_staircase());
        assert!(stripe.len() <= 2 + 3 + 1);
    }

    #[test]
    fn point_mass_at_top() {
        let p = [0.1, 0.2, 0.3, 0.4];
        let a = MarginalVector::point_mass(0, 3, 2);
        let (d, _) = fast_assign(&p, &a).unwrap();
        for row in d.rows() {
            assert_eq!(row, &[0.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn zero_probability_rows_follow_the_walk() {
        let p = [0.0, 1.0, 0.0];
        let a = MarginalVector::new(2, vec![0.0, 0.5, 0.5]).unwrap();
        let (d, stripe) = fast_assign(&p, &a).unwrap();
        assert_eq!(d.row(0), &[0.0, 0.0, 1.0]);
        assert_eq!(d.row(1), &[0.0, 0.5, 0.5]);
        assert_eq!(d.row(2), &[0.0, 1.0, 0.0]);
        assert!(stripe.cells.iter().all(|c| c.row == 1));
        assert!(is_generalized_monotone(&d, MONOTONE_TOLERANCE));
    }

    #[test]
    fn h_examples() {
        let cfg = SystemConfig::new(1, 2.0, vec![0.5, 0.5]).unwrap();
        let a = MarginalVector::new(0, vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(h_value(&cfg, &a).unwrap(), 1.0, epsilon = 1e-12);
        let a = MarginalVector::new(0, vec![1.0, 0.0]).unwrap();
        assert_abs_diff_eq!(h_value(&cfg, &a).unwrap(), 0.5, epsilon = 1e-12);

        let cfg = SystemConfig::new(3, 1.4, vec![1.0, 0.0]).unwrap();
        for b in 0..=3 {
            let a = MarginalVector::point_mass(b, 4, b);
            assert_abs_diff_eq!(h_value(&cfg, &a).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn subgradient_example() {
        let cfg = SystemConfig::new(1, 2.0, vec![0.5, 0.5]).unwrap();
        let a = MarginalVector::new(0, vec![0.5, 0.5]).unwrap();
        let nu = h_subgradient(&cfg, &a).unwrap();
        assert_abs_diff_eq!(nu[1] - nu[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(nu[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn infeasible_marginal_is_an_error() {
        let cfg = SystemConfig::new(2, 2.0, vec![0.5, 0.5]).unwrap();
        let a = MarginalVector::new(2, vec![0.6, 0.4, 0.0]).unwrap();
        assert!(matches!(h_value(&cfg, &a), Err(Error::Infeasible(_))));
    }

    #[test]
    fn monotone_check() {
        let anti = DecisionMatrix::new(0, vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(is_generalized_monotone(&anti, MONOTONE_TOLERANCE));
        let diag = DecisionMatrix::new(0, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!is_generalized_monotone(&diag, MONOTONE_TOLERANCE));
        let flat = DecisionMatrix::new(0, vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert!(!is_generalized_monotone(&flat, MONOTONE_TOLERANCE));
        let stair = DecisionMatrix::new(
            0,
            vec![vec![0.0, 0.5, 0.5], vec![0.0, 1.0, 0.0], vec![0.3, 0.7, 0.0]],
        )
        .unwrap();
        assert!(is_generalized_monotone(&stair, MONOTONE_TOLERANCE));
    }

    #[test]
    fn feasibility_examples() {
        assert!(marginal_feasible(0, &[0.5, 0.5], &[1.0, 0.0]));
        assert!(marginal_feasible(2, &[0.5, 0.5], &[0.0, 0.5, 0.5]));
        assert!(!marginal_feasible(2, &[0.5, 0.5], &[0.0, 0.6, 0.4]));
        assert!(!marginal_feasible(1, &[1.0, 0.0], &[0.1, 0.9]));
    }

    #[test]
    fn per_level_caps_are_not_sufficient() {
        let p = [0.5, 0.25, 0.25];
        let a = [0.0, 0.25, 0.5, 0.25];
        assert!(per_level_caps_hold(3, &p, &a));
        assert!(!marginal_feasible(3, &p, &a));
        let marginal = MarginalVector::new(3, a.to_vec()).unwrap();
        let (d, _) = fast_assign(&p, &marginal).unwrap();
        assert!(d.zero_pattern_excess() > 0.1);
        let cfg = SystemConfig::new(3, 1.4, p.to_vec()).unwrap();
        assert!(matches!(h_value(&cfg, &marginal), Err(Error::Infeasible(_))));
    }

    #[test]
    fn decision_matrix_validation() {
        assert!(DecisionMatrix::new(0, vec![vec![0.5, 0.4]]).is_err());
        assert!(DecisionMatrix::new(0, vec![vec![1.5, -0.5]]).is_err());
        assert!(DecisionMatrix::new(2, vec![vec![1.0, 0.0]]).is_err());
        let d = DecisionMatrix::new(1, vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(d.zero_pattern_excess(), 1.0);
        assert!(MarginalVector::new(0, vec![0.5, 0.6]).is_err());
    }
}
