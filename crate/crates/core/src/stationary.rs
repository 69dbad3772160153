//! Long-run distribution of a finite Markov chain started from state 0.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transition probabilities at or below this are treated as absent when
/// classifying states.
const EDGE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stationary {
    /// Long-run occupancy starting from state 0.
    pub r: Vec<f64>,
    /// Number of closed recurrent classes in the whole chain.
    pub recurrent_classes: usize,
}

impl Stationary {
    pub fn is_multichain(&self) -> bool {
        self.recurrent_classes > 1
    }
}

/// Solves `A' r = r`, `1' r = 1`.
///
/// Each recurrent class is solved directly, so periodic chains are handled.
/// When the chain has several closed classes the result is the limiting
/// occupancy from state 0: class distributions weighted by the probability of
/// being absorbed into each, and [`Stationary::is_multichain`] is set.
pub fn stationary_distribution(a: &[Vec<f64>]) -> Result<Stationary> {
    let n = a.len();
    if n == 0 || a.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch("transition matrix must be square".into()));
    }
    for (i, row) in a.iter().enumerate() {
        let total: f64 = row.iter().sum();
        if row.iter().any(|v| *v < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("row {i} of the transition matrix is not a pmf")));
        }
    }

    let reach = reachability(a);
    let mut class_of = vec![usize::MAX; n];
    let mut closed: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let class: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        let is_closed = class.iter().all(|&j| (0..n).all(|k| !reach[j][k] || class.contains(&k)));
        for &j in &class {
            class_of[j] = if is_closed { closed.len() } else { usize::MAX - 1 };
        }
        if is_closed {
            closed.push(class);
        }
    }

    let absorbed = absorption_from_origin(a, &closed, &class_of)?;
    let mut r = vec![0.0; n];
    for (class, weight) in closed.iter().zip(&absorbed) {
        if *weight <= 0.0 {
            continue;
        }
        let pi = class_distribution(a, class)?;
        for (&state, mass) in class.iter().zip(pi) {
            r[state] += weight * mass;
        }
    }
    Ok(Stationary {
        r,
        recurrent_classes: closed.len(),
    })
}

fn reachability(a: &[Vec<f64>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut reach = vec![vec![false; n]; n];
    for (start, row) in reach.iter_mut().enumerate() {
        let mut stack = vec![start];
        row[start] = true;
        while let Some(i) = stack.pop() {
            for (j, p) in a[i].iter().enumerate() {
                if *p > EDGE_TOLERANCE && !row[j] {
                    row[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    reach
}

/// Probability of ending in each closed class when starting from state 0.
fn absorption_from_origin(a: &[Vec<f64>], closed: &[Vec<usize>], class_of: &[usize]) -> Result<Vec<f64>> {
    if class_of[0] < closed.len() {
        let mut w = vec![0.0; closed.len()];
        w[class_of[0]] = 1.0;
        return Ok(w);
    }
    let transient: Vec<usize> = (0..a.len()).filter(|&i| class_of[i] >= closed.len()).collect();
    let t = transient.len();
    let mut lhs = DMatrix::<f64>::identity(t, t);
    for (r, &i) in transient.iter().enumerate() {
        for (c, &j) in transient.iter().enumerate() {
            lhs[(r, c)] -= a[i][j];
        }
    }
    let lu = lhs.lu();
    let origin = transient.iter().position(|&i| i == 0).expect("state 0 is transient");
    let mut weights = Vec::with_capacity(closed.len());
    for class in closed {
        let rhs = DVector::from_iterator(t, transient.iter().map(|&i| class.iter().map(|&j| a[i][j]).sum::<f64>()));
        let h = lu
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidArgument("singular absorption system".into()))?;
        weights.push(h[origin]);
    }
    Ok(weights)
}

fn class_distribution(a: &[Vec<f64>], class: &[usize]) -> Result<Vec<f64>> {
    let k = class.len();
    if k == 1 {
        return Ok(vec![1.0]);
    }
    // (A_CC' - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    let mut lhs = DMatrix::<f64>::zeros(k, k);
    for (r, &i) in class.iter().enumerate() {
        for (c, &j) in class.iter().enumerate() {
            lhs[(c, r)] = a[i][j];
        }
        lhs[(r, r)] -= 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(k);
    for c in 0..k {
        lhs[(k - 1, c)] = 1.0;
    }
    rhs[k - 1] = 1.0;
    let pi = lhs
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidArgument("singular stationary system".into()))?;
    Ok(pi.iter().map(|v| v.max(0.0)).collect())
}
