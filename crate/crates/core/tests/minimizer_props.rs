mod support;

use proptest::prelude::*;
use stableset::minimizer::{default_margin, MinimizeError, Termination};
use stableset::*;
use support::*;

fn assignment(values: Vec<f64>) -> FractionalAssignment {
    FractionalAssignment {
        values,
        objective: 0.0,
        fw_gap: 0.0,
        iterations: 0,
        residual: 0.0,
        termination: Termination::Converged,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Dominance with margin at least the edge residual never picks both
    /// ends of an edge.
    #[test]
    fn dominance_is_independent(seed in any::<u64>(), n in 2usize..30, w in 0.001..0.5f64, delta in 1e-9..1e-2f64, extra in 0.0..2.0f64) {
        let mut d = Draws::new(seed);
        let g = random_graph(n, d.range(0.05, 0.9), d.seed());
        let x = near_feasible(&mut d, &g, w, delta);
        let set = dominant_vertices(&x, w, delta * (1.0 + extra));
        prop_assert!(is_independent(&g, &set).unwrap());
    }

    /// Rounding returns exactly the dominant set when it is independent of size k.
    #[test]
    fn rounding_agrees_with_dominance(seed in any::<u64>(), n in 2usize..20, w in 0.001..0.5f64) {
        let mut d = Draws::new(seed);
        let g = random_graph(n, 0.3, d.seed());
        let x = near_feasible(&mut d, &g, w, 1e-6);
        let dom = dominant_vertices(&x, w, 1e-6);
        let k = dom.len();
        prop_assert_eq!(round_solution(&assignment(x.clone()), &g, k, w, 1e-6), Some(dom));
        prop_assert_eq!(round_solution(&assignment(x), &g, k + 1, w, 1e-6), None);
    }

    /// Iterates stay in the polytope and fixed vertices stay at one.
    #[test]
    fn iterates_are_feasible(seed in any::<u64>(), a2 in -5.0..5.0f64) {
        let mut d = Draws::new(seed);
        let spec = random_spec(&mut d, 8);
        match minimize(&spec, &quadratic(1.0, 0.3, a2, spec.w), &MinimizeOptions::default()) {
            Ok(a) => {
                prop_assert!(spec.residual(&a.values) <= 1e-7, "{}", a.residual);
                for v in spec.fixed_ones.iter() {
                    prop_assert!((a.value(v) - 1.0).abs() <= 1e-9);
                }
            }
            Err(MinimizeError::Infeasible) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn convex_quadratics_match_active_set_oracle() {
    let mut d = Draws::new(0x5eed);
    let mut checked = 0;
    while checked < 40 {
        let spec = random_spec(&mut d, 6);
        let (c, a1, a2) = (d.range(-5.0, 5.0), d.range(-5.0, 5.0), d.range(0.1, 10.0));
        let f = quadratic(c, a1, a2, spec.w);
        let oracle = qp_optimum(&spec, c, a1, a2);
        match minimize(&spec, &f, &MinimizeOptions::default()) {
            Err(MinimizeError::Infeasible) => assert_eq!(oracle, None),
            Err(e) => panic!("{e}"),
            Ok(a) => {
                let z = oracle.expect("oracle finds the optimum of a nonempty polytope");
                assert!(a.objective >= z - 1e-9 * (1.0 + z.abs()), "below the optimum: {} < {z}", a.objective);
                assert!(a.objective - z <= 1e-4, "{} vs {z} on {spec:?}", a.objective);
                checked += 1;
            }
        }
    }
}

#[test]
fn oracle_agrees_with_grid_in_small_dimension() {
    let mut d = Draws::new(17);
    let mut checked = 0;
    while checked < 20 {
        let spec = random_spec(&mut d, 3);
        let (c, a1, a2) = (d.range(-5.0, 5.0), d.range(-5.0, 5.0), d.range(0.1, 10.0));
        match (qp_optimum(&spec, c, a1, a2), grid_optimum(&spec, c, a1, a2, 1e-3)) {
            (None, g) => assert_eq!(g, None),
            (Some(z), Some(g)) => {
                assert!(g >= z - 1e-9, "{g} < {z}");
                assert!(g - z <= 1e-4 * (1.0 + a2), "{g} vs {z}");
                checked += 1;
            }
            (Some(z), None) => panic!("grid misses a nonempty polytope with optimum {z}"),
        }
    }
}

#[test]
fn fixed_vertices_are_held_and_recognized() {
    // Concave f drives Step B to a vertex; fixing a vertex keeps it in the set.
    let g = random_graph(12, 0.3, 5);
    let alpha = exact_mis(&g, None).optimal().unwrap().witness.clone();
    let v = alpha.iter().next().unwrap();
    let fixed: VertexSet = [v.0].into_iter().collect();
    let spec = PolytopeSpec::new(g.clone(), 2, 0.05, fixed, 0.0).unwrap();
    let out = solve_step_b(&spec, &quadratic(10.0, 0.0, -1.0, 0.05), &MinimizeOptions::default()).unwrap();
    let a = out.assignment.as_ref().unwrap();
    assert!((a.value(v) - 1.0).abs() < 1e-12);
    if let Some(s) = &out.recognized {
        assert!(s.contains(v) && is_independent(&g, s).unwrap());
    }
}

#[test]
fn recognition_requires_the_band() {
    // Two isolated vertices, k = 1: the integer point costs desiredCost exactly.
    let spec = PolytopeSpec::new(Graph::empty(2), 1, 0.1, VertexSet::new(), 0.0).unwrap();
    let f = quadratic(0.0, 0.0, -1.0, 0.1);
    let out = solve_step_b(&spec, &f, &MinimizeOptions::default()).unwrap();
    assert_eq!(out.status, SolveStatus::IntegerFound);
    assert!((out.assignment.unwrap().objective - out.desired_cost).abs() < 1e-12);
}

#[test]
fn convex_cost_stays_fractional() {
    // A convex f spreads mass evenly, so nothing clears the dominance cut.
    let g = random_graph(10, 0.3, 2);
    let spec = PolytopeSpec::new(g, 3, 0.05, VertexSet::new(), 0.0).unwrap();
    let out = solve_step_b(&spec, &quadratic(0.0, 0.0, 1.0, 0.05), &MinimizeOptions::default()).unwrap();
    assert_eq!(out.status, SolveStatus::Fractional);
    let a = out.assignment.unwrap();
    assert!(a.fw_gap <= 1e-6);
    assert!(a.values.iter().all(|&v| v < 0.5 * 1.05 + default_margin(&MinimizeOptions::default())));
}

#[test]
fn cuts_keep_iterates_feasible() {
    let g = random_graph(10, 0.4, 8);
    let spec = PolytopeSpec::new(g, 3, 0.05, VertexSet::new(), 0.0).unwrap();
    let opts = MinimizeOptions { nonlinear_cuts: true, ..MinimizeOptions::default() };
    let a = minimize(&spec, &quadratic(1.0, 0.0, 1.0, 0.05), &opts).unwrap();
    assert!(spec.residual(&a.values) <= 1e-7);
    assert_ne!(a.termination, Termination::NumericalFailure);
}
