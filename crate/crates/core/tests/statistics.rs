//! Monte Carlo estimates against exact values and bounds.

use kout_core::experiment::{run, wilson_interval, ExperimentConfig, SweepAxis, SweepSpec};
use kout_core::oracle::exact_connectivity;
use kout_core::theory::edge_probability;
use kout_core::{build_graph, ModelParams, SeedSpec};

fn params(n: u64, mu: &[f64], k: &[u64]) -> ModelParams {
    ModelParams::new(n, mu.to_vec(), k.to_vec()).unwrap()
}

#[test]
fn four_node_single_selection_matches_exact_value() {
    let p = params(4, &[1.0], &[1]);
    let trials = 100_000;
    let r = &run(&ExperimentConfig::single(p, trials, 2024).unwrap()).unwrap()[0];
    let exact = 78.0 / 81.0;
    let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
    assert!((r.empirical_p_connected - exact).abs() <= 4.0 * sigma, "{}", r.empirical_p_connected);
    assert!((r.mean_y - 2.0 / 27.0).abs() <= 4.0 * r.y_std_error());
}

#[test]
fn wilson_interval_covers_exact_value() {
    let p = params(5, &[0.6, 0.4], &[1, 2]);
    let exact = exact_connectivity(&p).unwrap().p_connected.to_f64();
    let hits = (0..20u64)
        .filter(|&batch| {
            let cfg = ExperimentConfig::single(p.clone(), 2000, 500 + batch).unwrap();
            let r = &run(&cfg).unwrap()[0];
            r.ci_low <= exact && exact <= r.ci_high
        })
        .count();
    assert!(hits >= 17, "{hits} of 20 intervals contain {exact}");
}

#[test]
fn pair_adjacency_frequency_matches_edge_probability() {
    let p = params(1000, &[0.9, 0.06, 0.04], &[1, 2, 3]);
    let trials = 100_000u64;
    // Nodes 0 and 1 are exchangeable with any other pair.
    let hits = (0..trials)
        .filter(|&t| build_graph(&p, SeedSpec::new(77, t)).is_adjacent(0, 1))
        .count() as f64;
    let q = edge_probability(&p);
    let sigma = (q * (1.0 - q) / trials as f64).sqrt();
    assert!((hits / trials as f64 - q).abs() <= 4.0 * sigma, "{} vs {q}", hits / trials as f64);
}

#[test]
fn sweep_points_respect_bounds_when_valid() {
    let base = params(200, &[0.5, 0.3, 0.2], &[1, 2, 2]);
    let spec = SweepSpec { vary: SweepAxis::KMax, from: 2, to: 8, step: 1 };
    let results = run(&ExperimentConfig::sweep(&base, &spec, 4000, 31).unwrap()).unwrap();
    assert_eq!(results.len(), 7);
    for r in &results {
        assert_eq!(r.totals.connected + r.totals.multi_component, r.trials);
        assert_eq!(r.empirical_p_connected, r.connected_trials as f64 / r.trials as f64);
        assert!(0.0 <= r.ci_low && r.ci_low <= r.empirical_p_connected);
        assert!(r.empirical_p_connected <= r.ci_high && r.ci_high <= 1.0);
        if r.bounds.lower_bound_valid == Some(true) {
            let lb = r.bounds.lower_bound_one_law.unwrap();
            assert!(r.ci_high >= lb, "CI misses [{lb}, 1] at {:?}", r.params);
            let (lo, hi) = wilson_interval(r.totals.y_zero, r.trials, r.confidence_level);
            let smb = r.bounds.second_moment_upper_bound.unwrap();
            assert!(r.empirical_p_y_zero <= smb + 0.5 * (hi - lo));
        }
    }
}

#[test]
fn sweep_over_n_keeps_mean_edges_near_expectation() {
    let base = params(50, &[0.7, 0.3], &[1, 4]);
    let spec = SweepSpec { vary: SweepAxis::N, from: 50, to: 250, step: 100 };
    let results = run(&ExperimentConfig::sweep(&base, &spec, 5000, 8).unwrap()).unwrap();
    for r in &results {
        let n = r.params.n() as f64;
        let expected = n * (n - 1.0) / 2.0 * r.bounds.edge_prob;
        assert!((r.mean_edges - expected).abs() <= 4.0 * r.edge_std_error());
    }
}
