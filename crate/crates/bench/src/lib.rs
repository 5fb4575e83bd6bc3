//! Workload builders shared by the benchmark targets.

use stableset::graph::{random_graph, Graph};
use stableset::paramfit::FitConfig;

/// Seeded Erdős–Rényi instances used across benchmarks.
pub fn workload(n: usize, p: f64) -> Graph {
    random_graph(n, p, 0x5eed)
}

/// Shifted-breakup fitting model without curvature rows.
pub fn fit_config(n: usize, k: usize) -> FitConfig {
    let mut c = FitConfig::new(n, k, 100_000, 20.0, 1500);
    c.tightened = true;
    c.convexity = false;
    c
}
