//! Random small instances for property checks.

use rand::Rng;

use crate::fast::{DecisionMatrix, MarginalVector};
use crate::model::SystemConfig;

/// A pmf over `len` values; some entries are zeroed, never all of them.
pub fn random_pmf<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { -rng.gen::<f64>().max(1e-12).ln() })
        .collect();
    if w.iter().all(|v| *v == 0.0) {
        let i = rng.gen_range(0..len);
        w[i] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Instance with `B <= max_b`, `X <= max_x` and `eta` in `[1.1, 3)`.
pub fn random_config<R: Rng>(rng: &mut R, max_b: usize, max_x: usize) -> SystemConfig {
    let b = rng.gen_range(0..=max_b);
    let x = rng.gen_range(0..=max_x);
    let eta = rng.gen_range(1.1..3.0);
    SystemConfig::new(b, eta, random_pmf(rng, x + 1)).expect("random config is valid")
}

/// Random decisions at level `b` respecting the zero pattern; rows are
/// sparse about half of the time.
pub fn random_decisions<R: Rng>(rng: &mut R, cfg: &SystemConfig, b: usize) -> DecisionMatrix {
    let levels = cfg.levels();
    let rows = (0..=cfg.max_request())
        .map(|m| {
            let lo = b.saturating_sub(m);
            let mut row = vec![0.0; levels];
            if rng.gen_bool(0.5) {
                row[rng.gen_range(lo..levels)] = 1.0;
            } else {
                for v in &mut row[lo..] {
                    *v = if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() };
                }
                let total: f64 = row.iter().sum();
                if total == 0.0 {
                    row[lo] = 1.0;
                } else {
                    row.iter_mut().for_each(|v| *v /= total);
                }
            }
            row
        })
        .collect();
    DecisionMatrix::new(b, rows).expect("random decisions are stochastic")
}

/// A realizable marginal at level `b`, drawn as the image of random decisions.
pub fn random_feasible_marginal<R: Rng>(rng: &mut R, cfg: &SystemConfig, b: usize) -> MarginalVector {
    let d = random_decisions(rng, cfg, b);
    let mut a = d.marginal(cfg.pmf());
    let total: f64 = a.iter().sum();
    a.iter_mut().for_each(|v| *v /= total);
    MarginalVector::new(b, a).expect("marginal is a pmf")
}

/// Continuation values of mixed sign and scale.
pub fn random_values<R: Rng>(rng: &mut R, levels: usize) -> Vec<f64> {
    let scale = rng.gen_range(0.1..10.0);
    (0..levels).map(|_| rng.gen_range(-scale..scale)).collect()
}
