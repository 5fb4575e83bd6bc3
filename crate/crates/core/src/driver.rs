//! Orchestration: floor sweeps, searches over the target size and the
//! end-to-end two-step run.
//!
//! A failed attempt at `k` is never read as evidence that no independent
//! set of size `k` exists; searches label such sizes unconfirmed.

use std::collections::HashMap;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costfn::CostParams;
use crate::graph::{greedy_independent_set, is_independent, Graph, GraphError, VertexSet};
use crate::minimizer::{solve_step_b, MinimizeOptions, PolytopeSpec, SolveOutcome, SolveStatus};
use crate::paramfit::{fit_parameters, FitConfig, FitStatus};

#[derive(Debug, Error, PartialEq)]
pub enum DriverError {
    #[error("invalid sweep: {0}")]
    Sweep(String),
    #[error("partial solution {0} is not independent")]
    DependentPartial(VertexSet),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("k = {k} is out of range for N = {n}")]
    BadK { k: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopMode {
    FirstHit,
    CollectAll,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub w_lo: f64,
    pub w_hi: f64,
    pub w_step: f64,
    pub stop_mode: StopMode,
    pub opts: MinimizeOptions,
    pub band: f64,
    /// Runs executed concurrently; `0` uses every core.
    pub jobs: usize,
}

impl SweepConfig {
    pub fn new(w_lo: f64, w_hi: f64, w_step: f64) -> Self {
        SweepConfig {
            w_lo,
            w_hi,
            w_step,
            stop_mode: StopMode::CollectAll,
            opts: MinimizeOptions::default(),
            band: 0.0,
            jobs: 0,
        }
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        if !(self.w_lo <= self.w_hi) {
            return Err(DriverError::Sweep("w_lo must not exceed w_hi".into()));
        }
        if !(self.w_step > 0.0) {
            return Err(DriverError::Sweep("w_step must be positive".into()));
        }
        if !(self.w_lo > 0.0 && self.w_hi < 1.0) {
            return Err(DriverError::Sweep("floor sizes must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// `w_lo + i·w_step` for every `i` with the value at most `w_hi`.
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.w_hi - self.w_lo) / self.w_step * (1.0 + 1e-12)).floor() as usize + 1;
        (0..count).map(|i| self.w_lo + i as f64 * self.w_step).collect()
    }
}

/// Where each run's cost parameters come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParamSource {
    /// Fixed coefficients, reused at every floor size.
    Transfer(CostParams),
    /// One fit at the template's own floor size, then transferred.
    FitOnce(FitConfig),
    /// A fresh fit at every floor size.
    Refit(FitConfig),
}

/// One structured line per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub k: usize,
    pub w: f64,
    pub status: SolveStatus,
    pub iterations: usize,
    pub seconds: f64,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} w={} status={} iterations={} seconds={:.3}",
            self.k, self.w, self.status, self.iterations, self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub w: f64,
    pub outcome: SolveOutcome,
    pub trace: TraceLine,
}

fn fit_at(template: &FitConfig, n: usize, k: usize, w: Option<f64>) -> Result<CostParams, SolveOutcome> {
    let mut cfg = template.clone();
    cfg.n = n;
    cfg.k = k;
    if w.is_some() {
        cfg.w_override = w;
    }
    match fit_parameters(&cfg) {
        Ok(r) if r.status == FitStatus::Optimal => Ok(r.params.expect("optimal fit has params")),
        Ok(r) => Err(SolveOutcome::bare(SolveStatus::InfeasibleFit, Some(format!("fit status {:?}", r.status)))),
        Err(e) => Err(SolveOutcome::bare(SolveStatus::InfeasibleFit, Some(e.to_string()))),
    }
}

fn run_one(g: &Graph, k: usize, w: f64, params: &Result<CostParams, SolveOutcome>, partial: &VertexSet, band: f64, opts: &MinimizeOptions) -> SolveOutcome {
    let params = match params {
        Ok(p) => p,
        Err(o) => return o.clone(),
    };
    let spec = match PolytopeSpec::new(g.clone(), k, w, partial.clone(), band) {
        Ok(s) => s,
        Err(e) => return SolveOutcome::bare(SolveStatus::Failed, Some(e.to_string())),
    };
    solve_step_b(&spec, params, opts).unwrap_or_else(|e| SolveOutcome::bare(SolveStatus::Failed, Some(e.to_string())))
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Runs Step B at every floor size of the sweep, in ascending `w`. In
/// first-hit mode the list ends at the first `IntegerFound`.
///
/// Runs execute in chunks of `jobs`; results depend only on the inputs, so
/// the list is the same for every width.
pub fn sweep_w(g: &Graph, k: usize, source: &ParamSource, sweep: &SweepConfig) -> Result<Vec<SweepRun>, DriverError> {
    sweep.validate()?;
    if k > g.n() {
        return Err(DriverError::BadK { k, n: g.n() });
    }
    let shared = match source {
        ParamSource::Transfer(p) => Some(Ok(*p)),
        ParamSource::FitOnce(t) => Some(fit_at(t, g.n(), k, None)),
        ParamSource::Refit(_) => None,
    };
    let points = sweep.points();
    let width = if sweep.jobs == 0 { rayon::current_num_threads() } else { sweep.jobs };
    let chunk = match sweep.stop_mode {
        StopMode::FirstHit => width.max(1),
        StopMode::CollectAll => points.len().max(1),
    };
    let partial = VertexSet::new();
    let mut out = Vec::new();
    for ws in points.chunks(chunk) {
        let runs: Vec<SweepRun> = with_pool(sweep.jobs, || {
            ws.par_iter()
                .map(|&w| {
                    let t = Instant::now();
                    let params = match (&shared, source) {
                        (Some(p), _) => p.clone(),
                        (None, ParamSource::Refit(tpl)) => fit_at(tpl, g.n(), k, Some(w)),
                        (None, _) => unreachable!("only refits lack shared parameters"),
                    };
                    let outcome = run_one(g, k, w, &params, &partial, sweep.band, &sweep.opts);
                    let trace = TraceLine {
                        k,
                        w,
                        status: outcome.status,
                        iterations: outcome.iterations(),
                        seconds: t.elapsed().as_secs_f64(),
                    };
                    SweepRun { w, outcome, trace }
                })
                .collect()
        });
        let hit = runs.iter().position(|r| r.outcome.status == SolveStatus::IntegerFound);
        match (sweep.stop_mode, hit) {
            (StopMode::FirstHit, Some(i)) => {
                out.extend(runs.into_iter().take(i + 1));
                break;
            }
            _ => out.extend(runs),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    Upward,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub mode: SearchMode,
    pub k_hi: usize,
    /// Parameter template; `N` and `k` are overwritten per attempt.
    pub fit: FitConfig,
    /// Floor sizes tried per `k`, in order.
    pub sweep: SweepConfig,
    /// `eps` values tried per `k`, outermost loop of the retry ladder.
    pub eps_ladder: Vec<f64>,
    /// Maximum number of `(eps, w)` attempts per `k`.
    pub budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Confirmed,
    /// The budget ran out without a recognized set; says nothing about `α`.
    Unconfirmed,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "confirmed",
            Verdict::Unconfirmed => "unconfirmed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub best_k: usize,
    pub witness: VertexSet,
    pub verdicts: Vec<(usize, Verdict)>,
    pub trace: Vec<TraceLine>,
}

/// Fits are cached per `(eps, w)` bit pattern: the graph, hence `N`, and
/// `k` are fixed within one call.
fn attempt_k(g: &Graph, k: usize, cfg: &SearchConfig, trace: &mut Vec<TraceLine>) -> Option<VertexSet> {
    let mut cache: HashMap<(u64, u64), Result<CostParams, SolveOutcome>> = HashMap::new();
    let attempts = cfg
        .eps_ladder
        .iter()
        .flat_map(|&eps| cfg.sweep.points().into_iter().map(move |w| (eps, w)))
        .take(cfg.budget);
    for (eps, w) in attempts {
        let t = Instant::now();
        let params = cache.entry((eps.to_bits(), w.to_bits())).or_insert_with(|| {
            let mut tpl = cfg.fit.clone();
            tpl.eps = eps;
            fit_at(&tpl, g.n(), k, Some(w))
        });
        let outcome = run_one(g, k, w, params, &VertexSet::new(), cfg.sweep.band, &cfg.sweep.opts);
        trace.push(TraceLine {
            k,
            w,
            status: outcome.status,
            iterations: outcome.iterations(),
            seconds: t.elapsed().as_secs_f64(),
        });
        if outcome.status == SolveStatus::IntegerFound {
            return outcome.recognized;
        }
    }
    None
}

/// Largest confirmed `k`, seeded by a greedy independent set.
///
/// Upward mode tries `seed+1, seed+2, …` and stops at the first unconfirmed
/// size. Binary mode keeps `[bottom, top]`, moving `bottom` above confirmed
/// sizes and `top` below unconfirmed ones.
pub fn search_k(g: &Graph, cfg: &SearchConfig) -> Result<SearchOutcome, DriverError> {
    cfg.sweep.validate()?;
    if cfg.k_hi > g.n() {
        return Err(DriverError::BadK { k: cfg.k_hi, n: g.n() });
    }
    let mut witness = greedy_independent_set(g);
    let mut best = witness.len();
    let mut verdicts = Vec::new();
    let mut trace = Vec::new();
    let record = |k: usize, found: Option<VertexSet>, verdicts: &mut Vec<(usize, Verdict)>| match found {
        Some(set) => {
            verdicts.push((k, Verdict::Confirmed));
            Some(set)
        }
        None => {
            verdicts.push((k, Verdict::Unconfirmed));
            None
        }
    };
    match cfg.mode {
        SearchMode::Upward => {
            let mut k = best + 1;
            while k <= cfg.k_hi {
                let found = attempt_k(g, k, cfg, &mut trace);
                match record(k, found, &mut verdicts) {
                    Some(set) => {
                        best = k;
                        witness = set;
                        k += 1;
                    }
                    None => break,
                }
            }
        }
        SearchMode::Binary => {
            let (mut bottom, mut top) = (best + 1, cfg.k_hi);
            while bottom <= top {
                let mid = bottom + (top - bottom) / 2;
                let found = attempt_k(g, mid, cfg, &mut trace);
                match record(mid, found, &mut verdicts) {
                    Some(set) => {
                        best = mid;
                        witness = set;
                        bottom = mid + 1;
                    }
                    None => top = mid - 1,
                }
            }
        }
    }
    debug_assert!(is_independent(g, &witness).unwrap_or(false) && witness.len() == best);
    Ok(SearchOutcome { best_k: best, witness, verdicts, trace })
}

/// The first `k` members of a confirmed witness: an independent set of
/// every smaller size.
pub fn shrink_witness(witness: &VertexSet, k: usize) -> VertexSet {
    witness.iter().take(k).collect()
}

/// Step A (or transfer) followed by Step B with `partial` fixed at 1.
pub fn run_two_step(
    g: &Graph,
    source: &ParamSource,
    k: usize,
    w: f64,
    partial: &VertexSet,
    band: f64,
    opts: &MinimizeOptions,
) -> Result<SolveOutcome, DriverError> {
    if !is_independent(g, partial)? {
        return Err(DriverError::DependentPartial(partial.clone()));
    }
    if k > g.n() {
        return Err(DriverError::BadK { k, n: g.n() });
    }
    let params = match source {
        ParamSource::Transfer(p) => Ok(*p),
        ParamSource::FitOnce(t) => fit_at(t, g.n(), k, None),
        ParamSource::Refit(t) => fit_at(t, g.n(), k, Some(w)),
    };
    Ok(run_one(g, k, w, &params, partial, band, opts))
}
