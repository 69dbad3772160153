//! End-to-end acceptance checks, one line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{enumerate_optimal_cost, uncross};
use proactive_cache::fast::{
    fast_assign, h_value, is_generalized_monotone, marginal_feasible, per_level_caps_hold, DecisionMatrix,
    MarginalVector,
};
use proactive_cache::harness::bench::{run_bench, speedup_trend_ok, AGREEMENT_TOLERANCE};
use proactive_cache::harness::random::{random_config, random_feasible_marginal};
use proactive_cache::harness::sweep::run_sweep;
use proactive_cache::harness::{Distribution, SweepSpec, SweepVariable};
use proactive_cache::oracle::assignment_lp;
use proactive_cache::sim::simulate_policy;
use proactive_cache::value_iteration::{value_iterate_degenerated, value_iterate_full};
use proactive_cache::{no_buffer_cost, infinite_buffer_cost, BellmanMethod, Policy, SystemConfig, ViOptions};

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn fast_instance(rng: &mut ChaCha8Rng) -> (SystemConfig, usize, MarginalVector) {
    let cfg = random_config(rng, 5, 5);
    let b = rng.gen_range(0..cfg.levels());
    let a = random_feasible_marginal(rng, &cfg, b);
    (cfg, b, a)
}

fn fast_exactness() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut worst_rel = 0.0f64;
    for _ in 0..1000 {
        let (cfg, _, a) = fast_instance(&mut rng);
        let h = h_value(&cfg, &a).expect("feasible marginal");
        let (lp, _) = assignment_lp(&cfg, &a).expect("LP solves");
        worst = worst.max((h - lp).abs());
        worst_rel = worst_rel.max((h - lp).abs() / lp.abs().max(1.0));
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-9 && elapsed < Duration::from_secs(60),
        format!("1000 instances, max |h - LP| = {worst:.2e} (relative {worst_rel:.2e}), {elapsed:.2?}"),
    )
}

fn weighted(d: &DecisionMatrix, p: &[f64]) -> Vec<Vec<f64>> {
    d.rows().iter().zip(p).map(|(r, pm)| r.iter().map(|v| v * pm).collect()).collect()
}

fn unweighted(template: &DecisionMatrix, f: &[Vec<f64>], p: &[f64]) -> DecisionMatrix {
    let rows = f
        .iter()
        .zip(p)
        .zip(template.rows())
        .map(|((r, pm), t)| if *pm > 0.0 { r.iter().map(|v| (v / pm).max(0.0)).collect() } else { t.clone() })
        .collect();
    DecisionMatrix::new(template.level(), rows).expect("stochastic rows")
}

fn monotonicity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut fast_bad, mut lp_bad, mut exchange_bad, mut exchanges) = (0, 0, 0, 0usize);
    for _ in 0..1000 {
        let (cfg, b, a) = fast_instance(&mut rng);
        let p = cfg.pmf();
        let (d, _) = fast_assign(p, &a).expect("assignment");
        if !is_generalized_monotone(&d, 1e-9) {
            fast_bad += 1;
        }

        let (lp, ld) = assignment_lp(&cfg, &a).expect("LP solves");
        let mut f = weighted(&ld, p);
        uncross(&mut f, 1e-12);
        let normalized = unweighted(&ld, &f, p);
        // Rows without weight carry no constraint; align them with the walk.
        let aligned = DecisionMatrix::new(
            b,
            normalized
                .rows()
                .iter()
                .zip(d.rows())
                .zip(p)
                .map(|((r, fr), pm)| if *pm > 0.0 { r.clone() } else { fr.clone() })
                .collect(),
        )
        .expect("stochastic rows");
        let cost_kept = (aligned.expected_cost(p, cfg.eta()) - lp).abs() <= 1e-9 * lp.abs().max(1.0);
        if !is_generalized_monotone(&aligned, 1e-9) || !cost_kept {
            lp_bad += 1;
        }

        let base = d.expected_cost(p, cfg.eta());
        let fd = weighted(&d, p);
        for m1 in 0..fd.len() {
            for m2 in m1 + 1..fd.len() {
                for n1 in b.saturating_sub(m1)..fd[0].len() {
                    for n2 in n1 + 1..fd[0].len() {
                        let delta = 0.5 * fd[m1][n2].min(fd[m2][n1]);
                        if delta <= 0.0 {
                            continue;
                        }
                        let mut g = fd.clone();
                        g[m1][n2] -= delta;
                        g[m2][n1] -= delta;
                        g[m1][n1] += delta;
                        g[m2][n2] += delta;
                        exchanges += 1;
                        if unweighted(&d, &g, p).expected_cost(p, cfg.eta()) < base - 1e-12 * base.abs().max(1.0) {
                            exchange_bad += 1;
                        }
                    }
                }
            }
        }
    }
    verdict(
        fast_bad + lp_bad + exchange_bad == 0,
        format!(
            "1000 instances: {fast_bad} non-monotone greedy outputs, {lp_bad} non-monotone LP optima, \
             {exchange_bad} of {exchanges} exchanges improving"
        ),
    )
}

fn convexity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let (cfg, b, a1) = fast_instance(&mut rng);
        let a2 = random_feasible_marginal(&mut rng, &cfg, b);
        let lambda: f64 = rng.gen();
        let mix: Vec<f64> = a1.as_slice().iter().zip(a2.as_slice()).map(|(x, y)| lambda * x + (1.0 - lambda) * y).collect();
        let total: f64 = mix.iter().sum();
        let mix = MarginalVector::new(b, mix.iter().map(|v| v / total).collect()).expect("pmf");
        let chord = lambda * h_value(&cfg, &a1).unwrap() + (1.0 - lambda) * h_value(&cfg, &a2).unwrap();
        worst = worst.max(h_value(&cfg, &mix).unwrap() - chord);
    }
    verdict(worst <= 1e-9, format!("1000 combinations, max h(mix) - chord = {worst:.2e}"))
}

/// The random instances shared by the decomposition and simulator criteria.
fn decomposition_instances() -> Vec<SystemConfig> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    (0..100).map(|_| random_config(&mut rng, 6, 6)).collect()
}

fn decomposition(instances: &[SystemConfig]) -> (Verdict, Vec<Policy>) {
    let start = Instant::now();
    let opts = ViOptions::with_eps(1e-8);
    let mut worst = 0.0f64;
    let mut policies = Vec::new();
    for cfg in instances {
        let (deg, _) = value_iterate_degenerated(cfg, &opts).expect("converges");
        let (full, _) = value_iterate_full(cfg, &opts).expect("converges");
        worst = worst.max((deg.average_cost - full.average_cost).abs());
        policies.push(deg);
    }
    let elapsed = start.elapsed();
    (
        verdict(
            worst <= 1e-6 && elapsed < Duration::from_secs(300),
            format!("100 instances, max |L_deg - L_full| = {worst:.2e}, {elapsed:.2?}"),
        ),
        policies,
    )
}

fn ground_truth() -> Verdict {
    let cfg = SystemConfig::new(1, 2.0, vec![0.5, 0.5]).unwrap();
    let oracle = enumerate_optimal_cost(&cfg);
    let opts = ViOptions::with_eps(1e-9);
    let deg = value_iterate_degenerated(&cfg, &opts).unwrap().0.average_cost;
    let full = value_iterate_full(&cfg, &opts).unwrap().0.average_cost;
    let marg = value_iterate_degenerated(&cfg, &opts.method(BellmanMethod::ConvexMarginal)).unwrap().0.average_cost;
    let ok = [oracle, deg, full, marg].iter().all(|l| (l - 0.5).abs() <= 1e-9);
    verdict(ok, format!("enumeration {oracle}, buffer-level {deg}, full-state {full}, marginal-space {marg}"))
}

fn bound_sandwich() -> Verdict {
    let start = Instant::now();
    let spec = SweepSpec {
        variable: SweepVariable::BufferSize,
        grid: (0..=40).collect(),
        distribution: Some(Distribution::UniformMax { uniform_max: 20 }),
        buffer_size: None,
        request_ratio: 1.5,
        etas: vec![1.4],
        eps: 1e-6,
        seed: None,
        replicas: 20,
        trace_len: 100_000,
        method: BellmanMethod::ExactRowwise,
    };
    let rows = run_sweep(&spec, 2024, None).expect("sweep runs");
    let cfg = SystemConfig::uniform(0, 1.4, 20).unwrap();
    let closed = no_buffer_cost(&cfg);
    let floor = infinite_buffer_cost(&cfg);
    let mut problems = Vec::new();
    if rows.iter().any(|r| !r.is_ok()) {
        problems.push("failed grid points".to_string());
    }
    if (rows[0].l_mdp - closed).abs() > 1e-6 * closed {
        problems.push(format!("L(0) = {} vs {closed}", rows[0].l_mdp));
    }
    for w in rows.windows(2) {
        if w[1].l_mdp > w[0].l_mdp + 1e-9 {
            problems.push(format!("L rises at B={}", w[1].variable));
        }
    }
    for r in &rows {
        if r.l_mdp < floor {
            problems.push(format!("L below the floor at B={}", r.variable));
        }
        let slack = 2.0 * r.cost_taut_stderr;
        if r.cost_taut_mean < floor - slack || r.cost_taut_mean > r.l_mdp + slack {
            problems.push(format!("offline {} outside [{floor}, {}] at B={}", r.cost_taut_mean, r.l_mdp, r.variable));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(600) {
        problems.push("over 10 minutes".into());
    }
    let last = rows.last().unwrap();
    verdict(
        problems.is_empty(),
        format!(
            "L(0) = {:.6} (closed form {closed:.6}), L(40) = {:.4}, offline(40) = {:.4} +- {:.4}, floor {floor:.4}, {elapsed:.2?}{}",
            rows[0].l_mdp,
            last.l_mdp,
            last.cost_taut_mean,
            last.cost_taut_stderr,
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    )
}

fn simulator(policies: &[Policy]) -> Verdict {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (i, policy) in policies.iter().enumerate() {
        let rep = simulate_policy(policy, 1_000_000, 7000 + i as u64, 0).expect("simulation runs");
        let l = policy.average_cost;
        let tol = (0.02 * l).max(4.0 * rep.std_error);
        let gap = (rep.mean_energy - l).abs();
        worst = worst.max(gap / tol.max(f64::MIN_POSITIVE));
        if gap > tol && gap > 0.0 {
            failures.push(format!("#{i}: {} vs {l}", rep.mean_energy));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} instances at T = 1e6, worst gap / tolerance = {worst:.3}{}",
            policies.len(),
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn runtime() -> Verdict {
    let spec = SweepSpec {
        variable: SweepVariable::Runtime,
        grid: (1..=8).map(|k| 2 * k).collect(),
        distribution: None,
        buffer_size: None,
        request_ratio: 1.5,
        etas: vec![1.4],
        eps: 1e-6,
        seed: None,
        replicas: 0,
        trace_len: 0,
        method: BellmanMethod::ExactRowwise,
    };
    match run_bench(&spec) {
        Err(e) => verdict(false, format!("{e}")),
        Ok(rows) => {
            let last = rows.last().unwrap();
            let agree = rows.iter().all(|r| (r.l_deg - r.l_full).abs() <= AGREEMENT_TOLERANCE);
            let speedups: Vec<String> = rows.iter().map(|r| format!("{:.1}", r.speedup)).collect();
            verdict(
                agree && last.speedup > 1.0 && speedup_trend_ok(&rows),
                format!("speedup by B = 2..16: [{}]", speedups.join(", ")),
            )
        }
    }
}

fn cumulative_caps_needed() -> Verdict {
    let cfg = SystemConfig::new(3, 1.4, vec![0.5, 0.25, 0.25]).unwrap();
    let a = vec![0.0, 0.25, 0.5, 0.25];
    let caps = per_level_caps_hold(3, cfg.pmf(), &a);
    let feasible = marginal_feasible(3, cfg.pmf(), &a);
    let (d, _) = fast_assign(cfg.pmf(), &MarginalVector::new(3, a).unwrap()).unwrap();
    let leak = d.zero_pattern_mass(cfg.pmf());
    verdict(
        caps && !feasible && leak > 0.0,
        format!("per-level caps hold: {caps}, cumulative test: {feasible}, forbidden mass {leak}"),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(&str, Verdict)> = Vec::new();
    let mut report = |name: &'static str, v: Verdict| {
        println!("{} {name}: {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        results.push((name, v));
    };
    report("1 greedy assignment matches LP", fast_exactness());
    report("2 generalized monotonicity", monotonicity());
    report("3 convexity of h", convexity());
    let instances = decomposition_instances();
    let (v, policies) = decomposition(&instances);
    report("4 buffer-level and full-state agree", v);
    report("5 ground-truth instance", ground_truth());
    report("6 bound sandwich", bound_sandwich());
    report("7 simulator consistency", simulator(&policies));
    report("8 runtime advantage", runtime());
    report("9 per-level caps counterexample", cumulative_caps_needed());
    let failed = results.iter().filter(|(_, v)| !v.passed).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
