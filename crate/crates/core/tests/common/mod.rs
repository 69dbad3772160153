#![allow(dead_code)]

use proactive_cache::SystemConfig;

/// Long-run average occupancy from level 0: the Cesaro limit of `P`, taken
/// as the plain limit of the lazy chain `(I + P) / 2` by repeated squaring.
/// Rows are renormalized after each squaring so rounding cannot compound.
pub fn cesaro_from_zero(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * p[i][j] + if i == j { 0.5 } else { 0.0 }).collect())
        .collect();
    for _ in 0..64 {
        let mut sq = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                if m[i][k] != 0.0 {
                    for j in 0..n {
                        sq[i][j] += m[i][k] * m[k][j];
                    }
                }
            }
        }
        for row in &mut sq {
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= total);
        }
        m = sq;
    }
    m[0].clone()
}

/// Minimum average cost from level 0 over every deterministic stationary
/// policy, enumerated over the states that have positive request probability.
pub fn enumerate_optimal_cost(cfg: &SystemConfig) -> f64 {
    let big_b = cfg.buffer_size();
    let p = cfg.pmf();
    let eta = cfg.eta();
    let states: Vec<(usize, usize)> = (0..=big_b)
        .flat_map(|b| (0..p.len()).filter(|&x| p[x] > 0.0).map(move |x| (b, x)))
        .collect();
    let lows: Vec<usize> = states.iter().map(|&(b, x)| b.saturating_sub(x)).collect();
    let mut choice = lows.clone();
    let mut best = f64::INFINITY;
    loop {
        let mut trans = vec![vec![0.0; big_b + 1]; big_b + 1];
        let mut cost = vec![0.0; big_b + 1];
        for (k, &(b, x)) in states.iter().enumerate() {
            let n = choice[k];
            trans[b][n] += p[x];
            cost[b] += p[x] * (eta.powi((n + x - b) as i32) - 1.0);
        }
        let occ = cesaro_from_zero(&trans);
        let l: f64 = occ.iter().zip(&cost).map(|(r, c)| r * c).sum();
        best = best.min(l);

        let mut k = 0;
        loop {
            if k == states.len() {
                return best;
            }
            if choice[k] < big_b {
                choice[k] += 1;
                break;
            }
            choice[k] = lows[k];
            k += 1;
        }
    }
}

/// Cheapest schedule on the grid `1/denominator` inside the corridor
/// `R_t - b0 <= Y_t <= R_t - b0 + B` ending at `Y_T = R_T - b0`, with a
/// slot costing `eta^y - 1` for a fractional `y`.
pub fn grid_schedule_cost(requests: &[usize], buffer_size: usize, eta: f64, b0: usize, denominator: usize) -> f64 {
    let q = denominator as i64;
    let width = buffer_size as i64 * q;
    let mut r = 0i64;
    // Cost to reach each grid offset above the lower corridor edge.
    let mut lower = -(b0 as i64) * q;
    let mut cost: Vec<f64> = vec![f64::INFINITY; (width + 1) as usize];
    // Y_0 = 0 sits at offset b0 * q above R_0 - b0.
    cost[(b0 as i64 * q) as usize] = 0.0;
    let step_cost: Vec<f64> = (0..=((requests.iter().max().copied().unwrap_or(0) + buffer_size + b0) as i64 * q))
        .map(|k| eta.powf(k as f64 / q as f64) - 1.0)
        .collect();
    for &x in requests {
        r += x as i64 * q;
        let new_lower = r - b0 as i64 * q;
        let mut next = vec![f64::INFINITY; (width + 1) as usize];
        for (j, slot) in next.iter_mut().enumerate() {
            let y_new = new_lower + j as i64;
            for (i, c) in cost.iter().enumerate() {
                let y_old = lower + i as i64;
                if c.is_finite() && y_new >= y_old {
                    let v = c + step_cost[(y_new - y_old) as usize];
                    if v < *slot {
                        *slot = v;
                    }
                }
            }
        }
        cost = next;
        lower = new_lower;
    }
    cost[0]
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Swaps crossing mass pairs `(m1, n1), (m2, n2)` with `m1 < m2, n1 < n2`
/// onto `(m1, n2), (m2, n1)` until none is left.
pub fn uncross(f: &mut [Vec<f64>], tol: f64) {
    for _ in 0..100_000 {
        let mut found = None;
        'search: for m1 in 0..f.len() {
            for n1 in 0..f[m1].len() {
                if f[m1][n1] <= tol {
                    continue;
                }
                for m2 in m1 + 1..f.len() {
                    for n2 in n1 + 1..f[m2].len() {
                        if f[m2][n2] > tol {
                            found = Some((m1, n1, m2, n2));
                            break 'search;
                        }
                    }
                }
            }
        }
        let Some((m1, n1, m2, n2)) = found else { return };
        let delta = f[m1][n1].min(f[m2][n2]);
        f[m1][n1] -= delta;
        f[m2][n2] -= delta;
        f[m1][n2] += delta;
        f[m2][n1] += delta;
    }
    panic!("uncrossing did not terminate");
}
