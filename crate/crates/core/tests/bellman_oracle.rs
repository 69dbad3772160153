use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use proactive_cache::bellman::{bellman_convex_marginal, bellman_exact_rowwise, BellmanMethod, SolverOptions};
use proactive_cache::fast::marginal_feasible;
use proactive_cache::harness::random::{random_config, random_values};
use proactive_cache::oracle::joint_bellman_lp;
use proactive_cache::SystemConfig;

fn instance(seed: u64, max: usize) -> (SystemConfig, usize, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = random_config(&mut rng, max, max);
    let b = rng.gen_range(0..cfg.levels());
    let v = random_values(&mut rng, cfg.levels());
    (cfg, b, v)
}

/// Objective of a decision matrix in the Bellman step.
fn objective(cfg: &SystemConfig, d: &proactive_cache::DecisionMatrix, v: &[f64]) -> f64 {
    let a = d.marginal(cfg.pmf());
    d.expected_cost(cfg.pmf(), cfg.eta()) + a.iter().zip(v).map(|(x, y)| x * y).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rowwise_matches_joint_lp(seed in any::<u64>()) {
        let (cfg, b, v) = instance(seed, 6);
        let exact = bellman_exact_rowwise(b, &cfg, &v);
        let (lp, _) = joint_bellman_lp(&cfg, b, &v).unwrap();
        prop_assert!((exact.value - lp).abs() <= 1e-9 * (1.0 + lp.abs()), "{} vs {}", exact.value, lp);
        prop_assert!((objective(&cfg, &exact.d_star, &v) - exact.value).abs() <= 1e-9 * (1.0 + lp.abs()));
        prop_assert!(exact.d_star.zero_pattern_excess() == 0.0);
    }

    #[test]
    fn marginal_space_matches_rowwise(seed in any::<u64>()) {
        let (cfg, b, v) = instance(seed, 8);
        let exact = bellman_exact_rowwise(b, &cfg, &v);
        let opts = SolverOptions::with_method(BellmanMethod::ConvexMarginal);
        let res = bellman_convex_marginal(b, &cfg, &v, &opts).unwrap();
        prop_assert!((res.value - exact.value).abs() <= 1e-6, "{} vs {}", res.value, exact.value);
        prop_assert!(marginal_feasible(b, cfg.pmf(), res.a_star.as_slice()));
        prop_assert!((objective(&cfg, &res.d_star, &v) - res.value).abs() <= 1e-6);
    }
}

#[test]
fn two_term_argmins() {
    let cfg = SystemConfig::new(1, 2.0, vec![0.5, 0.5]).unwrap();
    let r = bellman_exact_rowwise(0, &cfg, &[0.0, 0.0]);
    assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
    assert_eq!(r.d_star.rows(), &[vec![1.0, 0.0], vec![1.0, 0.0]]);

    let r = bellman_exact_rowwise(1, &cfg, &[0.0, 0.0]);
    assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
    assert_eq!(r.d_star.rows(), &[vec![0.0, 1.0], vec![1.0, 0.0]]);

    let opts = SolverOptions::with_method(BellmanMethod::ConvexMarginal);
    let r = bellman_convex_marginal(0, &cfg, &[0.0, 0.0], &opts).unwrap();
    assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-8);
}

#[test]
fn dominant_penalty_fills_the_buffer() {
    let cfg = SystemConfig::uniform(3, 1.4, 2).unwrap();
    let v = [1e6, 1e6, 1e6, 0.0];
    for b in 0..=3 {
        let r = bellman_exact_rowwise(b, &cfg, &v);
        for row in r.d_star.rows() {
            assert_eq!(row[3], 1.0);
        }
    }
}

#[test]
fn singleton_region_in_one_step() {
    let cfg = SystemConfig::new(2, 1.4, vec![1.0, 0.0]).unwrap();
    let opts = SolverOptions::with_method(BellmanMethod::ConvexMarginal);
    let r = bellman_convex_marginal(2, &cfg, &[0.3, -0.2, 0.7], &opts).unwrap();
    assert_eq!(r.a_star.as_slice(), &[0.0, 0.0, 1.0]);
    assert_abs_diff_eq!(r.value, 0.7, epsilon = 1e-12);
}
