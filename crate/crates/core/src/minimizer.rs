//! Step B: minimize `Σ f(x_j)` over the floor-lifted edge polytope
//!
//! ```text
//! w ≤ x_j ≤ 1,   x_i + x_j ≤ 1 + w  (ij ∈ E),   Σ x_j = k + (N−k)·w,
//! x_j = 1 for j in the fixed set,
//! ```
//!
//! by Frank–Wolfe with away steps, then read an independent set off the
//! result by dominance rounding.
//!
//! The linear subproblem is a warm-started simplex over the polytope. The
//! objective is tracked as `N·C + Σ (f(x_j) − C)`: the constant term of the
//! linear families is kept out of every comparison because it can exceed the
//! remaining terms by fifteen orders of magnitude. The line search bisects
//! on the directional derivative, which never contains `C`.
//!
//! The optional product cuts `x_i·x_j ≤ ((1+w)/2)² − ε` and `x_i·x_j ≤ w` on
//! edges are nonconvex, so they enter as exterior quadratic penalties
//! `μ·Σ max(0, x_i·x_j − bound)²`. The weight starts at `penalty_weight`
//! and grows tenfold per round for `penalty_rounds` rounds, each round
//! warm-started from the previous iterate.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costfn::{basis, compensated_sum, CostError, CostParams, Family};
use crate::graph::{is_independent, Graph, GraphError, VertexId, VertexSet};
use crate::lpcore::{LinearProgram, LpError, LpStatus, Relation, Sense, Simplex, SolverOptions, VarId};

#[derive(Debug, Error, PartialEq)]
pub enum MinimizeError {
    #[error("invalid polytope: {0}")]
    Spec(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("polytope is empty")]
    Infeasible,
    #[error("cost function undefined at x = {x} for vertex {vertex}")]
    Domain { vertex: u32, x: f64 },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("linear subproblem ended with status {0:?}")]
    Subproblem(LpStatus),
}

/// The Step B feasible region for one graph, target size and floor.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeSpec {
    pub graph: Graph,
    pub k: usize,
    pub w: f64,
    pub fixed_ones: VertexSet,
    /// Accepted `|objective − desiredCost|` for an integer recognition.
    pub band: f64,
}

impl PolytopeSpec {
    pub fn new(graph: Graph, k: usize, w: f64, fixed_ones: VertexSet, band: f64) -> Result<Self, MinimizeError> {
        if !(w > 0.0 && w < 1.0) {
            return Err(MinimizeError::Spec(format!("w = {w} must lie in (0, 1)")));
        }
        if k > graph.n() {
            return Err(MinimizeError::Spec(format!("k = {k} exceeds N = {}", graph.n())));
        }
        if !(band >= 0.0) {
            return Err(MinimizeError::Spec("band must be non-negative".into()));
        }
        if !is_independent(&graph, &fixed_ones)? {
            return Err(MinimizeError::Spec(format!("fixed vertices {fixed_ones} are not independent")));
        }
        Ok(PolytopeSpec { graph, k, w, fixed_ones, band })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// `k + (N−k)·w`.
    pub fn target_sum(&self) -> f64 {
        self.k as f64 + (self.n() - self.k) as f64 * self.w
    }

    /// The polytope as an LP with variables `x[1..=N]` and no objective.
    pub fn linear_program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new();
        let xs: Vec<VarId> = self
            .graph
            .vertices()
            .map(|v| {
                let lo = if self.fixed_ones.contains(v) { 1.0 } else { self.w };
                lp.add_var(format!("x[{}]", v.0), lo, 1.0)
            })
            .collect();
        for &(i, j) in self.graph.edges() {
            let (a, b) = (xs[i as usize - 1], xs[j as usize - 1]);
            lp.add_constraint(format!("independence[{i},{j}]"), &[(a, 1.0), (b, 1.0)], Relation::Le, 1.0 + self.w)
                .expect("declared vars");
        }
        let all: Vec<(VarId, f64)> = xs.iter().map(|&v| (v, 1.0)).collect();
        lp.add_constraint("size_ind_set", &all, Relation::Eq, self.target_sum()).expect("declared vars");
        lp
    }

    /// Largest violation of any bound, edge or cardinality row at `x`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let mut r: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            let lo = if self.fixed_ones.contains(VertexId::from_index(j)) { 1.0 } else { self.w };
            r = r.max(lo - v).max(v - 1.0);
        }
        for &(i, j) in self.graph.edges() {
            r = r.max(x[i as usize - 1] + x[j as usize - 1] - 1.0 - self.w);
        }
        r.max((compensated_sum(x.iter().copied()) - self.target_sum()).abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub max_iters: usize,
    /// Stop once the Frank–Wolfe gap `∇F(x)·(x − s)` falls to this value.
    pub gap_tol: f64,
    pub away_steps: bool,
    pub nonlinear_cuts: bool,
    /// `ε` in the cut `x_i·x_j ≤ ((1+w)/2)² − ε`.
    pub epsilon_cut: f64,
    pub penalty_weight: f64,
    pub penalty_rounds: usize,
    pub lp: SolverOptions,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            max_iters: 5000,
            gap_tol: 1e-6,
            away_steps: true,
            nonlinear_cuts: false,
            epsilon_cut: 1e-4,
            penalty_weight: 1e4,
            penalty_rounds: 4,
            lp: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    IterationLimit,
    /// An iterate left the polytope or the objective increased.
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalAssignment {
    /// `values[j]` belongs to vertex `j + 1`.
    pub values: Vec<f64>,
    /// `Σ f(x_j)`, without penalty terms.
    pub objective: f64,
    pub fw_gap: f64,
    pub iterations: usize,
    pub residual: f64,
    pub termination: Termination,
}

impl FractionalAssignment {
    pub fn value(&self, v: VertexId) -> f64 {
        self.values[v.index()]
    }

    /// One `j value` line per vertex, ascending `j`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (j, v) in self.values.iter().enumerate() {
            writeln!(s, "{} {}", j + 1, v).expect("string write");
        }
        s
    }
}

/// `f − C` per coordinate plus its derivative; `C` is zero for the legacy family.
struct Surrogate<'a> {
    params: &'a CostParams,
    constant: f64,
    theta: Vec<f64>,
}

impl<'a> Surrogate<'a> {
    fn new(params: &'a CostParams) -> Self {
        let theta = params.coeffs();
        let constant = if params.family() == Family::Legacy { 0.0 } else { theta[0] };
        Surrogate { params, constant, theta }
    }

    fn excess(&self, j: usize, x: f64) -> Result<f64, MinimizeError> {
        let domain = |_: CostError| MinimizeError::Domain { vertex: j as u32 + 1, x };
        let v = match self.params.family() {
            Family::Legacy => self.params.eval(x).map_err(domain)?,
            fam => compensated_sum(self.theta.iter().zip(basis(fam, x)).skip(1).map(|(t, b)| t * b)),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(MinimizeError::Domain { vertex: j as u32 + 1, x })
        }
    }

    fn total_excess(&self, x: &[f64]) -> Result<f64, MinimizeError> {
        let terms = x.iter().enumerate().map(|(j, &v)| self.excess(j, v)).collect::<Result<Vec<_>, _>>()?;
        Ok(compensated_sum(terms))
    }

    fn derivative(&self, j: usize, x: f64) -> Result<f64, MinimizeError> {
        match self.params.derivative(x) {
            Ok(d) if d.is_finite() => Ok(d),
            _ => Err(MinimizeError::Domain { vertex: j as u32 + 1, x }),
        }
    }
}

struct Penalty {
    edges: Vec<(usize, usize)>,
    bound: f64,
    mu: f64,
}

impl Penalty {
    fn value(&self, x: &[f64]) -> f64 {
        if self.mu == 0.0 {
            return 0.0;
        }
        let s: f64 = self.edges.iter().map(|&(i, j)| (x[i] * x[j] - self.bound).max(0.0).powi(2)).sum();
        self.mu * s
    }

    fn add_gradient(&self, x: &[f64], g: &mut [f64]) {
        if self.mu == 0.0 {
            return;
        }
        for &(i, j) in &self.edges {
            let c = x[i] * x[j] - self.bound;
            if c > 0.0 {
                g[i] += 2.0 * self.mu * c * x[j];
                g[j] += 2.0 * self.mu * c * x[i];
            }
        }
    }
}

struct Problem<'a> {
    f: Surrogate<'a>,
    pen: Penalty,
}

impl Problem<'_> {
    /// Penalized objective without the `N·C` constant.
    fn value(&self, x: &[f64]) -> Result<f64, MinimizeError> {
        Ok(self.f.total_excess(x)? + self.pen.value(x))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, MinimizeError> {
        let mut g = x.iter().enumerate().map(|(j, &v)| self.f.derivative(j, v)).collect::<Result<Vec<_>, _>>()?;
        self.pen.add_gradient(x, &mut g);
        Ok(g)
    }

    /// Step along `d` that minimizes the objective on `[0, gmax]`.
    fn line_search(&self, x: &[f64], d: &[f64], gmax: f64) -> Result<f64, MinimizeError> {
        let at = |t: f64| -> Vec<f64> {
            x.iter().zip(d).map(|(&a, &b)| a + t * b).collect()
        };
        let slope = |t: f64| -> Result<f64, MinimizeError> {
            let y = at(t);
            Ok(compensated_sum(self.gradient(&y)?.iter().zip(d).map(|(g, di)| g * di)))
        };
        let (mut lo, mut hi) = (0.0, gmax);
        if slope(gmax)? <= 0.0 {
            lo = gmax;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid)? > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // On a nonconvex segment the far end can still beat the stationary
        // point, and either can sit above the start; a negative initial slope
        // guarantees that halving eventually descends.
        let f0 = self.value(x)?;
        let (ft, fmax) = (self.value(&at(lo))?, self.value(&at(gmax))?);
        let (mut t, best) = if fmax <= ft { (gmax, fmax) } else { (lo, ft) };
        if best < f0 {
            return Ok(t);
        }
        t = if lo > 0.0 { lo } else { gmax };
        for _ in 0..60 {
            t *= 0.5;
            if self.value(&at(t))? < f0 {
                return Ok(t);
            }
        }
        Ok(0.0)
    }
}

fn same_vertex(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

/// Distinct vertices minimizing and maximizing each coordinate, plus the
/// phase-1 vertex. Their mean is the deterministic starting point.
fn barycentric_vertices(
    lmo: &mut Simplex,
    n: usize,
    first: Vec<f64>,
) -> Result<Vec<(Vec<f64>, f64)>, MinimizeError> {
    let mut out: Vec<(Vec<f64>, f64)> = vec![(first, 0.0)];
    let mut c = vec![0.0; n];
    for j in 0..n {
        for sign in [1.0, -1.0] {
            c[j] = sign;
            lmo.set_objective(Sense::Minimize, &c)?;
            let sol = lmo.solve();
            if sol.status != LpStatus::Optimal {
                return Err(MinimizeError::Subproblem(sol.status));
            }
            if !out.iter().any(|(v, _)| same_vertex(v, &sol.values)) {
                out.push((sol.values, 0.0));
            }
        }
        c[j] = 0.0;
    }
    Ok(out)
}

/// Frank–Wolfe over the spec's polytope, started from the barycenter of
/// the coordinate-extreme vertices (fixed vertices sit at their bound of 1).
pub fn minimize(
    spec: &PolytopeSpec,
    params: &CostParams,
    opts: &MinimizeOptions,
) -> Result<FractionalAssignment, MinimizeError> {
    let n = spec.n();
    let lp = spec.linear_program();
    let mut lmo = Simplex::new(&lp, &opts.lp)?;
    lmo.set_objective(Sense::Minimize, &vec![0.0; n])?;
    let start = lmo.solve();
    match start.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(MinimizeError::Infeasible),
        s => return Err(MinimizeError::Subproblem(s)),
    }
    let edges: Vec<(usize, usize)> =
        spec.graph.edges().iter().map(|&(i, j)| (i as usize - 1, j as usize - 1)).collect();
    let cut_bound = if opts.nonlinear_cuts {
        // The second cut is the tighter of the two whenever w < ((1+w)/2)² − ε.
        spec.w.min(((1.0 + spec.w) / 2.0).powi(2) - opts.epsilon_cut)
    } else {
        0.0
    };
    let mut prob = Problem { f: Surrogate::new(params), pen: Penalty { edges, bound: cut_bound, mu: 0.0 } };

    let mut active = barycentric_vertices(&mut lmo, n, start.values)?;
    let share = 1.0 / active.len() as f64;
    let mut x = vec![0.0; n];
    for (v, lam) in active.iter_mut() {
        *lam = share;
        for (xi, vi) in x.iter_mut().zip(v.iter()) {
            *xi += share * vi;
        }
    }
    let feas_tol = 10.0 * opts.lp.tol_feas * (1.0 + spec.target_sum());
    let rounds = if opts.nonlinear_cuts { opts.penalty_rounds.max(1) } else { 1 };
    let mut iterations = 0;
    let mut gap = f64::INFINITY;
    let mut termination = Termination::IterationLimit;

    'rounds: for round in 0..rounds {
        if opts.nonlinear_cuts {
            prob.pen.mu = opts.penalty_weight * 10f64.powi(round as i32);
        }
        let mut fx = prob.value(&x)?;
        termination = Termination::IterationLimit;
        while iterations < opts.max_iters {
            let g = prob.gradient(&x)?;
            lmo.set_objective(Sense::Minimize, &g)?;
            let sol = lmo.solve();
            if sol.status != LpStatus::Optimal {
                return Err(MinimizeError::Subproblem(sol.status));
            }
            let s = sol.values;
            let gx = compensated_sum(g.iter().zip(&x).map(|(a, b)| a * b));
            let gs = compensated_sum(g.iter().zip(&s).map(|(a, b)| a * b));
            gap = gx - gs;
            if gap <= opts.gap_tol {
                // A vanishing gap away from a vertex can be a saddle of a
                // concave objective; leave only through a strict decrease.
                let d: Vec<f64> = s.iter().zip(&x).map(|(a, b)| a - b).collect();
                let t = if same_vertex(&s, &x) { 0.0 } else { prob.line_search(&x, &d, 1.0)? };
                let drop = if t > 0.0 {
                    fx - prob.value(&x.iter().zip(&d).map(|(a, b)| a + t * b).collect::<Vec<_>>())?
                } else {
                    0.0
                };
                if drop <= 1e-9 * (1.0 + fx.abs()) {
                    termination = Termination::Converged;
                    break;
                }
            }
            let away = if opts.away_steps && active.len() > 1 && gap > opts.gap_tol {
                active
                    .iter()
                    .enumerate()
                    .map(|(i, (v, _))| (i, compensated_sum(g.iter().zip(v).map(|(a, b)| a * b))))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .filter(|&(_, gv)| gv - gx > gap)
            } else {
                None
            };
            let (d, gmax): (Vec<f64>, f64) = match away {
                Some((i, _)) => {
                    let lam = active[i].1;
                    (x.iter().zip(&active[i].0).map(|(a, b)| a - b).collect(), lam / (1.0 - lam))
                }
                None => (s.iter().zip(&x).map(|(a, b)| a - b).collect(), 1.0),
            };
            let t = prob.line_search(&x, &d, gmax)?;
            iterations += 1;
            if t <= 0.0 {
                termination = Termination::Converged;
                break;
            }
            let next: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            match away {
                Some((i, _)) => {
                    for (_, lam) in active.iter_mut() {
                        *lam *= 1.0 + t;
                    }
                    active[i].1 -= t;
                    if t >= gmax {
                        active.remove(i);
                    }
                }
                None => {
                    for (_, lam) in active.iter_mut() {
                        *lam *= 1.0 - t;
                    }
                    if t >= 1.0 {
                        active.clear();
                    }
                    match active.iter_mut().find(|(v, _)| same_vertex(v, &s)) {
                        Some((_, lam)) => *lam += t,
                        None => active.push((s, t)),
                    }
                }
            }
            active.retain(|(_, lam)| *lam > 1e-15);
            let fn_next = prob.value(&next)?;
            let slack = 1e-12 * (1.0 + fx.abs());
            if fn_next > fx + slack || spec.residual(&next) > feas_tol {
                x = next;
                termination = Termination::NumericalFailure;
                break 'rounds;
            }
            x = next;
            fx = fn_next;
        }
        if termination == Termination::IterationLimit {
            break;
        }
    }

    let excess = prob.f.total_excess(&x)?;
    Ok(FractionalAssignment {
        objective: n as f64 * prob.f.constant + excess,
        residual: spec.residual(&x),
        values: x,
        fw_gap: gap,
        iterations,
        termination,
    })
}

/// Vertices with `x_t > (1+w)/2 + margin`. When every edge row holds to
/// within `margin`, no edge has both endpoints in the result.
pub fn dominant_vertices(values: &[f64], w: f64, margin: f64) -> VertexSet {
    let cut = 0.5 * (1.0 + w) + margin;
    values.iter().enumerate().filter(|(_, &v)| v > cut).map(|(j, _)| VertexId::from_index(j)).collect()
}

/// [`dominant_vertices`] of the assignment, when they form an independent
/// set of size exactly `k`.
pub fn round_solution(a: &FractionalAssignment, g: &Graph, k: usize, w: f64, margin: f64) -> Option<VertexSet> {
    let set = dominant_vertices(&a.values, w, margin);
    (set.len() == k && is_independent(g, &set).unwrap_or(false)).then_some(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    IntegerFound,
    Fractional,
    Infeasible,
    NotConverged,
    NumericalFailure,
    /// Step A produced no parameters.
    InfeasibleFit,
    /// The run stopped with an error, recorded in the outcome's note.
    Failed,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::IntegerFound => "integer-found",
            SolveStatus::Fractional => "fractional",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NotConverged => "not-converged",
            SolveStatus::NumericalFailure => "numerical-failure",
            SolveStatus::InfeasibleFit => "infeasible-fit",
            SolveStatus::Failed => "failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub assignment: Option<FractionalAssignment>,
    pub recognized: Option<VertexSet>,
    pub desired_cost: f64,
    pub note: Option<String>,
}

impl SolveOutcome {
    /// An outcome without an assignment.
    pub fn bare(status: SolveStatus, note: Option<String>) -> Self {
        SolveOutcome { status, assignment: None, recognized: None, desired_cost: f64::NAN, note }
    }

    pub fn iterations(&self) -> usize {
        self.assignment.as_ref().map_or(0, |a| a.iterations)
    }
}

/// Default recognition margin: ten times the simplex feasibility tolerance.
pub fn default_margin(opts: &MinimizeOptions) -> f64 {
    10.0 * opts.lp.tol_feas
}

/// Runs [`minimize`], then [`round_solution`]. The status is
/// `IntegerFound` iff a size-`k` independent set is recognized and
/// `|objective − desiredCost| ≤ band + 1e−9·max(1, |desiredCost|)`.
pub fn solve_step_b(
    spec: &PolytopeSpec,
    params: &CostParams,
    opts: &MinimizeOptions,
) -> Result<SolveOutcome, MinimizeError> {
    let params = (*params).with_w(spec.w);
    let desired = params.desired_cost(spec.n(), spec.k).map_err(|_| MinimizeError::Domain { vertex: 0, x: spec.w })?;
    let a = match minimize(spec, &params, opts) {
        Ok(a) => a,
        Err(MinimizeError::Infeasible) => {
            return Ok(SolveOutcome {
                status: SolveStatus::Infeasible,
                assignment: None,
                recognized: None,
                desired_cost: desired,
                note: None,
            })
        }
        Err(e) => return Err(e),
    };
    let margin = default_margin(opts).max(a.residual);
    let recognized = round_solution(&a, &spec.graph, spec.k, spec.w, margin);
    let within_band = (a.objective - desired).abs() <= spec.band + 1e-9 * desired.abs().max(1.0);
    let status = match (&recognized, a.termination) {
        (_, Termination::NumericalFailure) => SolveStatus::NumericalFailure,
        (Some(_), _) if within_band => SolveStatus::IntegerFound,
        (_, Termination::IterationLimit) => SolveStatus::NotConverged,
        _ => SolveStatus::Fractional,
    };
    Ok(SolveOutcome { status, assignment: Some(a), recognized, desired_cost: desired, note: None })
}
