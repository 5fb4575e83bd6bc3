//! Independent oracles shared by the integration and acceptance suites.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use stableset::costfn::PolyParams;
use stableset::{is_independent, random_graph, CostParams, Graph, PolytopeSpec, VertexId, VertexSet};

/// Largest independent set by enumerating all `2^n` subsets (`n ≤ 20`).
pub fn brute_alpha(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 20);
    let mut adj = vec![0u32; n];
    for &(i, j) in g.edges() {
        adj[i as usize - 1] |= 1 << (j - 1);
        adj[j as usize - 1] |= 1 << (i - 1);
    }
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|v| s & (1 << v) == 0 || adj[v] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Seeded uniform draws.
pub struct Draws(ChaCha8Rng);

impl Draws {
    pub fn new(seed: u64) -> Self {
        Draws(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int(&mut self, lo: usize, hi: usize) -> usize {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as usize
    }

    pub fn seed(&mut self) -> u64 {
        self.0.next_u64()
    }
}

/// `f(x) = c + a1·x + a2·x²`, convex for `a2 > 0`.
pub fn quadratic(c: f64, a1: f64, a2: f64, w: f64) -> CostParams {
    CostParams::Poly(PolyParams { c, a: [a1, a2, 0.0, 0.0], b: [0.0; 4], w })
}

/// A random Step B instance on `2..=max_n` vertices. The floor is a whole
/// number of thousandths so that grid points land on every face.
pub fn random_spec(d: &mut Draws, max_n: usize) -> PolytopeSpec {
    let n = d.int(2, max_n);
    let g = random_graph(n, d.range(0.2, 0.7), d.seed());
    let w = d.int(1, 200) as f64 / 1000.0;
    let k = d.int(1, n);
    let mut fixed = VertexSet::new();
    for v in g.vertices() {
        if fixed.len() < 2.min(k) && d.unit() < 0.3 {
            let mut next = fixed.clone();
            next.insert(v);
            if is_independent(&g, &next).unwrap() {
                fixed = next;
            }
        }
    }
    PolytopeSpec::new(g, k, w, fixed, 0.0).unwrap()
}

/// Inequality rows `a·x ≤ b` of the polytope (bounds and edges).
fn inequalities(spec: &PolytopeSpec) -> Vec<(Vec<f64>, f64)> {
    let n = spec.n();
    let mut rows = Vec::new();
    for j in 0..n {
        let lo = if spec.fixed_ones.contains(VertexId::from_index(j)) { 1.0 } else { spec.w };
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        rows.push((e.clone(), -lo));
        e[j] = 1.0;
        rows.push((e, 1.0));
    }
    for &(i, j) in spec.graph.edges() {
        let mut e = vec![0.0; n];
        e[i as usize - 1] = 1.0;
        e[j as usize - 1] = 1.0;
        rows.push((e, 1.0 + spec.w));
    }
    rows
}

fn feasible(spec: &PolytopeSpec, x: &[f64], tol: f64) -> bool {
    let sum: f64 = x.iter().sum();
    (sum - spec.target_sum()).abs() <= tol
        && inequalities(spec).iter().all(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() <= b + tol)
}

fn total(c: f64, a1: f64, a2: f64, x: &[f64]) -> f64 {
    x.iter().map(|&v| c + a1 * v + a2 * v * v).sum()
}

/// Exact minimum of `Σ (c + a1·x_j + a2·x_j²)` over the polytope, `a2 > 0`,
/// or `None` when the polytope is empty.
///
/// The minimizer is the unconstrained minimizer on the affine hull of its
/// active rows, so it appears among the KKT solutions of the
/// equality-constrained problems over every subset of at most `N − 1`
/// inequality rows; every other feasible candidate costs at least as much.
pub fn qp_optimum(spec: &PolytopeSpec, c: f64, a1: f64, a2: f64) -> Option<f64> {
    let n = spec.n();
    let ineq = inequalities(spec);
    let m = ineq.len();
    let mut best: Option<f64> = None;
    let mut subset: Vec<usize> = Vec::new();
    loop {
        let s = subset.len();
        let dim = n + 1 + s;
        let mut kkt = DMatrix::zeros(dim, dim);
        let mut rhs = DVector::zeros(dim);
        for j in 0..n {
            kkt[(j, j)] = 2.0 * a2;
            rhs[j] = -a1;
            kkt[(j, n)] = 1.0;
            kkt[(n, j)] = 1.0;
        }
        rhs[n] = spec.target_sum();
        for (r, &i) in subset.iter().enumerate() {
            for j in 0..n {
                kkt[(j, n + 1 + r)] = ineq[i].0[j];
                kkt[(n + 1 + r, j)] = ineq[i].0[j];
            }
            rhs[n + 1 + r] = ineq[i].1;
        }
        if let Some(sol) = kkt.lu().solve(&rhs) {
            let x: Vec<f64> = sol.iter().take(n).copied().collect();
            if x.iter().all(|v| v.is_finite()) && feasible(spec, &x, 1e-9) {
                let z = total(c, a1, a2, &x);
                best = Some(best.map_or(z, |b: f64| b.min(z)));
            }
        }
        // next subset in lexicographic order, size at most n − 1
        if s < n - 1 && subset.last().map_or(0, |&l| l + 1) < m {
            let next = subset.last().map_or(0, |&l| l + 1);
            subset.push(next);
            continue;
        }
        loop {
            match subset.pop() {
                None => return best,
                Some(l) if l + 1 < m => {
                    subset.push(l + 1);
                    break;
                }
                Some(_) => {}
            }
        }
    }
}

/// Minimum over a grid of step `h` on the hyperplane `Σx = target`
/// (`N ≤ 3`; the last coordinate is determined by the others).
pub fn grid_optimum(spec: &PolytopeSpec, c: f64, a1: f64, a2: f64, h: f64) -> Option<f64> {
    let n = spec.n();
    assert!(n <= 3);
    let t = spec.target_sum();
    let steps = (1.0 / h).round() as usize;
    let axis: Vec<f64> = (0..=steps).map(|i| i as f64 * h).collect();
    let mut best: Option<f64> = None;
    let mut consider = |x: Vec<f64>| {
        if feasible(spec, &x, 1e-12) {
            let z = total(c, a1, a2, &x);
            best = Some(best.map_or(z, |b: f64| b.min(z)));
        }
    };
    match n {
        1 => consider(vec![t]),
        2 => axis.iter().for_each(|&a| consider(vec![a, t - a])),
        _ => {
            for &a in &axis {
                for &b in &axis {
                    consider(vec![a, b, t - a - b]);
                }
            }
        }
    }
    best
}

/// A random assignment on `g` with every value in `[w, 1]` and every edge
/// row `x_i + x_j ≤ 1 + w` violated by at most `delta`. Some values sit
/// exactly on the tolerance boundary.
pub fn near_feasible(d: &mut Draws, g: &Graph, w: f64, delta: f64) -> Vec<f64> {
    let mut x: Vec<f64> = (0..g.n())
        .map(|_| match d.int(0, 3) {
            0 => 1.0,
            1 => 0.5 * (1.0 + w) + delta,
            _ => d.range(w, 1.0),
        })
        .collect();
    for &(i, j) in g.edges() {
        let (i, j) = (i as usize - 1, j as usize - 1);
        let cap = 1.0 + w + delta;
        if x[i] + x[j] > cap {
            if d.unit() < 0.5 {
                x[i] = cap - x[j];
            } else {
                x[j] = cap - x[i];
            }
        }
    }
    x
}
