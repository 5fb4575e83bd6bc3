mod support;

use proptest::prelude::*;
use stableset::driver::SweepRun;
use stableset::paramfit::FitConfig;
use stableset::*;
use support::*;

fn concave(w: f64) -> CostParams {
    quadratic(10.0, 0.0, -1.0, w)
}

fn fit_template() -> FitConfig {
    let mut c = FitConfig::new(2, 1, 100_000, 5.0, 1000);
    c.convexity = false;
    c
}

fn search_config(k_hi: usize, mode: SearchMode) -> SearchConfig {
    let mut sweep = SweepConfig::new(0.01, 0.05, 0.02);
    sweep.jobs = 1;
    SearchConfig { mode, k_hi, fit: fit_template(), sweep, eps_ladder: vec![5.0, 20.0], budget: 6 }
}

/// Outcomes without wall-clock fields.
fn stripped(runs: &[SweepRun]) -> Vec<(u64, SolveOutcome)> {
    runs.iter().map(|r| (r.w.to_bits(), r.outcome.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// A search never reports more than the independence number, and its
    /// witness is an independent set of the reported size.
    #[test]
    fn search_is_sound(seed in any::<u64>(), n in 3usize..=14, p in 0.1..0.7f64, binary in any::<bool>()) {
        let g = random_graph(n, p, seed);
        let alpha = brute_alpha(&g);
        let mode = if binary { SearchMode::Binary } else { SearchMode::Upward };
        let out = search_k(&g, &search_config(n, mode)).unwrap();
        prop_assert!(out.best_k <= alpha);
        prop_assert_eq!(out.witness.len(), out.best_k);
        prop_assert!(is_independent(&g, &out.witness).unwrap());
        for &(k, v) in &out.verdicts {
            if v == Verdict::Confirmed {
                prop_assert!(k <= out.best_k);
            }
        }
    }

    /// No floor size recognizes a set larger than the independence number.
    #[test]
    fn sizes_above_alpha_never_hit(seed in any::<u64>(), n in 4usize..=12) {
        let g = random_graph(n, 0.4, seed);
        let alpha = brute_alpha(&g);
        prop_assume!(alpha < n);
        let runs = sweep_w(&g, alpha + 1, &ParamSource::Transfer(concave(0.01)), &SweepConfig::new(0.01, 0.2, 0.01)).unwrap();
        prop_assert_eq!(runs.len(), 20);
        for r in &runs {
            prop_assert_ne!(r.outcome.status, SolveStatus::IntegerFound);
            prop_assert!(r.outcome.recognized.is_none());
        }
    }
}

#[test]
fn sweeps_do_not_depend_on_job_count() {
    let g = random_graph(14, 0.3, 11);
    let alpha = brute_alpha(&g);
    for source in [ParamSource::Transfer(concave(0.01)), ParamSource::Refit(fit_template())] {
        let mut outcomes = Vec::new();
        for jobs in [1, 3, 0] {
            let mut s = SweepConfig::new(0.01, 0.1, 0.01);
            s.jobs = jobs;
            outcomes.push(stripped(&sweep_w(&g, alpha, &source, &s).unwrap()));
        }
        assert_eq!(outcomes[0], outcomes[1]);
        assert_eq!(outcomes[0], outcomes[2]);
    }
}

#[test]
fn first_hit_truncates_after_the_hit() {
    let g = Graph::empty(5);
    let mut s = SweepConfig::new(0.01, 0.1, 0.01);
    s.stop_mode = StopMode::FirstHit;
    s.jobs = 4;
    let runs = sweep_w(&g, 2, &ParamSource::Transfer(concave(0.01)), &s).unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs[0].outcome.status, SolveStatus::IntegerFound);
    s.stop_mode = StopMode::CollectAll;
    assert_eq!(sweep_w(&g, 2, &ParamSource::Transfer(concave(0.01)), &s).unwrap().len(), 10);
}

#[test]
fn trace_lines_follow_runs() {
    let g = random_graph(8, 0.3, 4);
    let runs = sweep_w(&g, 2, &ParamSource::Transfer(concave(0.01)), &SweepConfig::new(0.02, 0.04, 0.01)).unwrap();
    for r in &runs {
        assert_eq!((r.trace.k, r.trace.w, r.trace.status), (2, r.w, r.outcome.status));
        let line = r.trace.to_string();
        assert!(line.starts_with(&format!("k=2 w={} status={}", r.w, r.outcome.status)), "{line}");
    }
}

#[test]
fn partial_solution_is_kept() {
    let g = random_graph(12, 0.3, 9);
    let best = exact_mis(&g, None).optimal().unwrap().witness.clone();
    let first: VertexSet = best.iter().take(1).collect();
    let out = run_two_step(&g, &ParamSource::Transfer(concave(0.02)), best.len(), 0.02, &first, 0.0, &MinimizeOptions::default())
        .unwrap();
    if let Some(set) = out.recognized {
        assert!(first.iter().all(|v| set.contains(v)));
        assert!(is_independent(&g, &set).unwrap());
    }
}
