//! Bounded-variable primal simplex.
//!
//! Every row `i` gets a logical variable `s_i` with `a_i·x − s_i = 0`, whose
//! bounds encode the relation. A basis is a set `S` of basic structurals
//! together with the basic logicals `L`; the rows `R` whose logical is
//! nonbasic satisfy `|R| = |S|`, and every basis solve reduces to the dense
//! kernel `K = A[R, S]`. The kernel is refactorized each iteration, so basic
//! values are always recomputed from the nonbasic ones rather than updated.
//!
//! Phase 1 minimizes the sum of infeasibilities of the current basis
//! (composite method), phase 2 the objective. Pricing is Dantzig's rule,
//! switching to Bland's smallest-index rule after a run of degenerate
//! pivots. The ratio test is Harris' two-pass variant.

use std::collections::HashSet;
use std::hash::{DefaultHasher, Hash, Hasher};

use nalgebra::{DMatrix, DVector};

use super::{check_values, LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense, SolverOptions};

const NONE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable held at zero.
    Zero,
}

enum Step {
    Continue,
    Done(LpStatus),
}

/// Reusable solver instance. The constraint matrix is fixed at construction;
/// the objective may be replaced between solves, and the last basis is kept
/// as a warm start.
pub struct Simplex {
    lp: LinearProgram,
    opts: SolverOptions,
    n: usize,
    m: usize,
    /// working row -> original row
    row_map: Vec<usize>,
    rows: Vec<Vec<(usize, f64)>>,
    cols: Vec<Vec<(usize, f64)>>,
    /// bounds of structurals (0..n) then logicals (n..n+m), scaled
    lo: Vec<f64>,
    hi: Vec<f64>,
    col_scale: Vec<f64>,
    cost: Vec<f64>,
    state: Vec<State>,
    x: Vec<f64>,
    basic_s: Vec<usize>,
    pos_s: Vec<usize>,
    rows_r: Vec<usize>,
    /// Set when presolve already proved infeasibility.
    presolve_infeasible: bool,
    degenerate_run: usize,
    /// Bases visited during the current run of non-improving pivots.
    stalled: HashSet<u64>,
    iterations: usize,
    resets: usize,
}

fn pow2(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        1.0
    } else {
        2f64.powi(v.log2().round() as i32)
    }
}

impl Simplex {
    pub fn new(lp: &LinearProgram, opts: &SolverOptions) -> Result<Self, LpError> {
        Self::build(lp, opts, false)
    }

    /// With `normalize`, every bound is divided by a power of two near the
    /// largest finite bound magnitude, so feasibility tolerances become
    /// relative to the model's largest right-hand side.
    fn build(lp: &LinearProgram, opts: &SolverOptions, normalize: bool) -> Result<Self, LpError> {
        lp.validate()?;
        if opts.tol_feas.is_nan() || opts.tol_feas <= 0.0 {
            return Err(LpError::BadTolerance);
        }
        let n = lp.num_vars();
        let mut lo: Vec<f64> = lp.vars.iter().map(|v| v.lower).collect();
        let mut hi: Vec<f64> = lp.vars.iter().map(|v| v.upper).collect();
        let mut presolve_infeasible = false;

        // presolve: empty rows are checked, singleton rows become bounds
        let mut row_map = Vec::new();
        for (i, c) in lp.constraints.iter().enumerate() {
            let (rlo, rhi) = match c.rel {
                Relation::Le => (f64::NEG_INFINITY, c.rhs),
                Relation::Ge => (c.rhs, f64::INFINITY),
                Relation::Eq => (c.rhs, c.rhs),
            };
            match c.coeffs.len() {
                0 => {
                    let t = opts.tol_feas * c.rhs.abs().max(1.0);
                    if rlo > t || rhi < -t {
                        presolve_infeasible = true;
                    }
                }
                1 => {
                    let (v, a) = c.coeffs[0];
                    let (mut blo, mut bhi) = (rlo / a, rhi / a);
                    if a < 0.0 {
                        std::mem::swap(&mut blo, &mut bhi);
                    }
                    lo[v.0] = lo[v.0].max(blo);
                    hi[v.0] = hi[v.0].min(bhi);
                }
                _ => row_map.push(i),
            }
        }
        for j in 0..n {
            if lo[j] > hi[j] {
                if lo[j] - hi[j] <= opts.tol_feas * lo[j].abs().max(1.0) {
                    let mid = 0.5 * (lo[j] + hi[j]);
                    lo[j] = mid;
                    hi[j] = mid;
                } else {
                    presolve_infeasible = true;
                }
            }
        }

        let m = row_map.len();
        let mut rows: Vec<Vec<(usize, f64)>> =
            row_map.iter().map(|&i| lp.constraints[i].coeffs.iter().map(|&(v, a)| (v.0, a)).collect()).collect();

        // geometric-mean scaling, rounded to powers of two
        let mut row_scale = vec![1.0; m];
        let mut col_scale = vec![1.0; n];
        if opts.scaling && m > 0 {
            for _ in 0..8 {
                for (i, row) in rows.iter().enumerate() {
                    let (mut mx, mut mn) = (0.0f64, f64::INFINITY);
                    for &(j, a) in row {
                        let v = (a * col_scale[j]).abs();
                        mx = mx.max(v);
                        mn = mn.min(v);
                    }
                    row_scale[i] = pow2(1.0 / (mx * mn).sqrt());
                }
                let mut cmx = vec![0.0f64; n];
                let mut cmn = vec![f64::INFINITY; n];
                for (i, row) in rows.iter().enumerate() {
                    for &(j, a) in row {
                        let v = (a * row_scale[i]).abs();
                        cmx[j] = cmx[j].max(v);
                        cmn[j] = cmn[j].min(v);
                    }
                }
                for j in 0..n {
                    col_scale[j] = if cmx[j] > 0.0 { pow2(1.0 / (cmx[j] * cmn[j]).sqrt()) } else { 1.0 };
                }
            }
        }
        for (i, row) in rows.iter_mut().enumerate() {
            for e in row.iter_mut() {
                e.1 *= row_scale[i] * col_scale[e.0];
            }
        }
        let mut cols = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            for &(j, a) in row {
                cols[j].push((i, a));
            }
        }
        let big = lo.iter().chain(&hi).chain(row_map.iter().map(|&i| &lp.constraints[i].rhs)).filter(|b| b.is_finite())
            .fold(0.0f64, |a, b| a.max(b.abs()));
        let bound_scale = if normalize && big > 1.0 { pow2(big) } else { 1.0 };
        for j in 0..n {
            col_scale[j] *= bound_scale;
            lo[j] /= col_scale[j];
            hi[j] /= col_scale[j];
        }
        for (i, &orig) in row_map.iter().enumerate() {
            let c = &lp.constraints[orig];
            let r = row_scale[i] / bound_scale;
            let (a, b) = match c.rel {
                Relation::Le => (f64::NEG_INFINITY, c.rhs * r),
                Relation::Ge => (c.rhs * r, f64::INFINITY),
                Relation::Eq => (c.rhs * r, c.rhs * r),
            };
            lo.push(a);
            hi.push(b);
        }

        let mut s = Simplex {
            lp: lp.clone(),
            opts: opts.clone(),
            n,
            m,
            row_map,
            rows,
            cols,
            lo,
            hi,
            col_scale,
            cost: vec![0.0; n],
            state: Vec::new(),
            x: Vec::new(),
            basic_s: Vec::new(),
            pos_s: vec![NONE; n],
            rows_r: Vec::new(),
            presolve_infeasible,
            degenerate_run: 0,
            stalled: HashSet::new(),
            iterations: 0,
            resets: 0,
        };
        s.load_objective();
        s.slack_basis(None);
        Ok(s)
    }

    fn load_objective(&mut self) {
        let sign = if self.lp.sense == Some(Sense::Maximize) { -1.0 } else { 1.0 };
        let raw: Vec<f64> = (0..self.n).map(|j| sign * self.lp.objective[j] * self.col_scale[j]).collect();
        let big = raw.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        let norm = if big > 0.0 { pow2(big) } else { 1.0 };
        self.cost = raw.into_iter().map(|c| c / norm).collect();
    }

    /// Replaces the objective, keeping the current basis as a warm start.
    pub fn set_objective(&mut self, sense: Sense, c: &[f64]) -> Result<(), LpError> {
        if c.len() != self.n {
            return Err(LpError::ObjectiveLength { got: c.len(), expected: self.n });
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        self.lp.objective = c.to_vec();
        self.lp.sense = Some(sense);
        self.load_objective();
        Ok(())
    }

    /// All logicals basic; structurals at the bound nearest `near`.
    fn slack_basis(&mut self, near: Option<&[f64]>) {
        let nm = self.n + self.m;
        self.state = vec![State::Lower; nm];
        self.x = vec![0.0; nm];
        for j in 0..self.n {
            let (l, h) = (self.lo[j], self.hi[j]);
            let target = near.map_or(0.0, |v| v[j]);
            let (st, v) = match (l.is_finite(), h.is_finite()) {
                (true, true) => {
                    if (target - l).abs() <= (h - target).abs() {
                        (State::Lower, l)
                    } else {
                        (State::Upper, h)
                    }
                }
                (true, false) => (State::Lower, l),
                (false, true) => (State::Upper, h),
                (false, false) => (State::Zero, 0.0),
            };
            self.state[j] = st;
            self.x[j] = v;
        }
        for i in 0..self.m {
            self.state[self.n + i] = State::Basic;
        }
        self.basic_s.clear();
        self.pos_s = vec![NONE; self.n];
        self.rows_r.clear();
    }

    fn kernel(&self) -> DMatrix<f64> {
        let k = self.basic_s.len();
        let mut km = DMatrix::zeros(k, k);
        for (r, &i) in self.rows_r.iter().enumerate() {
            for &(j, a) in &self.rows[i] {
                let c = self.pos_s[j];
                if c != NONE {
                    km[(r, c)] = a;
                }
            }
        }
        km
    }

    fn tol_of(&self, b: f64) -> f64 {
        self.opts.tol_feas * b.abs().max(1.0)
    }

    /// Phase-1 cost of a basic variable: −1 below its lower bound, +1 above
    /// its upper bound, 0 otherwise.
    fn infeas_cost(&self, v: usize) -> f64 {
        let x = self.x[v];
        if x < self.lo[v] - self.tol_of(self.lo[v]) {
            -1.0
        } else if x > self.hi[v] + self.tol_of(self.hi[v]) {
            1.0
        } else {
            0.0
        }
    }

    fn iterate(&mut self) -> Step {
        let n = self.n;
        let k = self.basic_s.len();
        let km = self.kernel();
        let (lu, lut) = if k > 0 {
            let lu = km.clone().lu();
            let u = lu.u();
            let diag: Vec<f64> = (0..k).map(|i| u[(i, i)].abs()).collect();
            let mx = diag.iter().cloned().fold(0.0, f64::max);
            let mn = diag.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(mn > 1e-14 * mx) {
                return self.reset("singular basis kernel");
            }
            (Some(lu), Some(km.transpose().lu()))
        } else {
            (None, None)
        };
        let solve = |b: DVector<f64>| -> Option<DVector<f64>> { lu.as_ref().and_then(|l| l.solve(&b)) };
        let solve_t = |b: DVector<f64>| -> Option<DVector<f64>> { lut.as_ref().and_then(|l| l.solve(&b)) };

        // basic values
        if k > 0 {
            let mut r = DVector::zeros(k);
            for (p, &i) in self.rows_r.iter().enumerate() {
                let mut acc = self.x[n + i];
                for &(j, a) in &self.rows[i] {
                    if self.pos_s[j] == NONE {
                        acc -= a * self.x[j];
                    }
                }
                r[p] = acc;
            }
            let Some(xs) = solve(r) else { return self.reset("kernel solve failed") };
            for (c, &j) in self.basic_s.iter().enumerate() {
                self.x[j] = xs[c];
            }
        }
        for i in 0..self.m {
            if self.state[n + i] == State::Basic {
                self.x[n + i] = self.rows[i].iter().map(|&(j, a)| a * self.x[j]).sum();
            }
        }
        if self.x.iter().any(|v| !v.is_finite()) {
            return self.reset("non-finite basic values");
        }

        // phase and basic costs
        let mut c_basic = vec![0.0; n + self.m];
        let mut phase1 = false;
        for v in 0..n + self.m {
            if self.state[v] == State::Basic {
                let c = self.infeas_cost(v);
                if c != 0.0 {
                    phase1 = true;
                }
                c_basic[v] = c;
            }
        }
        if !phase1 {
            for &j in &self.basic_s {
                c_basic[j] = self.cost[j];
            }
        }

        // duals
        let mut y = vec![0.0; self.m];
        for i in 0..self.m {
            if self.state[n + i] == State::Basic {
                y[i] = -c_basic[n + i];
            }
        }
        if k > 0 {
            let mut rhs = DVector::zeros(k);
            for (c, &j) in self.basic_s.iter().enumerate() {
                let mut acc = c_basic[j];
                for &(i, a) in &self.cols[j] {
                    if self.state[n + i] == State::Basic {
                        acc -= a * y[i];
                    }
                }
                rhs[c] = acc;
            }
            let Some(yr) = solve_t(rhs) else { return self.reset("dual solve failed") };
            for (p, &i) in self.rows_r.iter().enumerate() {
                y[i] = yr[p];
            }
        }

        // pricing
        let bland = self.degenerate_run >= self.opts.bland_after;
        let tol_d = self.opts.tol_dual;
        let mut best: Option<(usize, f64, f64)> = None; // (var, dir, score)
        for v in 0..n + self.m {
            let st = self.state[v];
            if st == State::Basic || self.lo[v] == self.hi[v] {
                continue;
            }
            let d = if v < n {
                let c = if phase1 { 0.0 } else { self.cost[v] };
                c - self.cols[v].iter().map(|&(i, a)| a * y[i]).sum::<f64>()
            } else {
                y[v - n]
            };
            let dir = match st {
                State::Lower if d < -tol_d => 1.0,
                State::Upper if d > tol_d => -1.0,
                State::Zero if d.abs() > tol_d => -d.signum(),
                _ => continue,
            };
            let score = d.abs();
            match best {
                None => best = Some((v, dir, score)),
                Some((_, _, s)) if !bland && score > s => best = Some((v, dir, score)),
                _ => {}
            }
            if bland && best.is_some() {
                break;
            }
        }
        let Some((q, dir, score)) = best else {
            return Step::Done(if phase1 { LpStatus::Infeasible } else { LpStatus::Optimal });
        };

        // entering column through the basis: alpha = B^{-1} a_q
        let mut aq = vec![0.0; self.m];
        if q < n {
            for &(i, a) in &self.cols[q] {
                aq[i] = a;
            }
        } else {
            aq[q - n] = -1.0;
        }
        let mut alpha = vec![0.0; n + self.m];
        if k > 0 {
            let r = DVector::from_iterator(k, self.rows_r.iter().map(|&i| aq[i]));
            let Some(a_s) = solve(r) else { return self.reset("column solve failed") };
            for (c, &j) in self.basic_s.iter().enumerate() {
                alpha[j] = a_s[c];
            }
        }
        let mut acc = vec![0.0; self.m];
        for &j in &self.basic_s {
            let aj = alpha[j];
            if aj != 0.0 {
                for &(i, a) in &self.cols[j] {
                    acc[i] += a * aj;
                }
            }
        }
        for i in 0..self.m {
            if self.state[n + i] == State::Basic {
                alpha[n + i] = acc[i] - aq[i];
            }
        }

        // Harris ratio test; delta is the rate of change of each basic
        let tol_p = self.opts.tol_pivot;
        let mut cands: Vec<(usize, f64, f64, bool)> = Vec::new(); // (var, exact t, rate, hits upper)
        let mut t_harris = f64::INFINITY;
        for v in 0..n + self.m {
            if self.state[v] != State::Basic {
                continue;
            }
            let delta = -dir * alpha[v];
            if delta.abs() <= tol_p {
                continue;
            }
            let (x, l, h) = (self.x[v], self.lo[v], self.hi[v]);
            let cost = if phase1 { c_basic[v] } else { 0.0 };
            let (bound, upper) = if delta > 0.0 {
                if cost < 0.0 {
                    (l, false)
                } else if cost > 0.0 || !h.is_finite() {
                    continue;
                } else {
                    (h, true)
                }
            } else if cost > 0.0 {
                (h, true)
            } else if cost < 0.0 || !l.is_finite() {
                continue;
            } else {
                (l, false)
            };
            let t = ((bound - x) / delta).max(0.0);
            // Bland's guarantee needs the exact minimum ratio
            let slack = if bland { 0.0 } else { delta.signum() * self.tol_of(bound) };
            t_harris = t_harris.min(((bound - x + slack) / delta).max(0.0));
            cands.push((v, t, delta, upper));
        }
        let flip = if self.lo[q].is_finite() && self.hi[q].is_finite() {
            self.hi[q] - self.lo[q]
        } else {
            f64::INFINITY
        };
        let mut leave: Option<(usize, f64, bool)> = None;
        let mut best_rate = 0.0;
        for &(v, t, delta, upper) in &cands {
            if t <= t_harris {
                let better = match leave {
                    None => true,
                    Some((lv, _, _)) => {
                        if bland {
                            v < lv
                        } else {
                            delta.abs() > best_rate
                        }
                    }
                };
                if better {
                    leave = Some((v, t, upper));
                    best_rate = delta.abs();
                }
            }
        }

        let step = match leave {
            Some((_, t, _)) if t < flip => t,
            _ => flip,
        };
        if !step.is_finite() {
            if phase1 {
                return self.reset("unbounded phase-1 ray");
            }
            return Step::Done(LpStatus::Unbounded);
        }
        // progress is the predicted decrease of the phase objective
        let scale: f64 = if phase1 {
            (0..n + self.m).filter(|&v| self.state[v] == State::Basic).map(|v| self.x[v].abs()).sum()
        } else {
            (0..n).map(|j| (self.cost[j] * self.x[j]).abs()).sum()
        };
        if step * score <= 1e-11 * scale.max(1.0) {
            self.degenerate_run += 1;
        } else {
            self.degenerate_run = 0;
        }
        self.iterations += 1;

        match leave {
            Some((lv, t, upper)) if t < flip => {
                // pivot: q enters, lv leaves at its bound
                self.state[lv] = if upper { State::Upper } else { State::Lower };
                self.x[lv] = if upper { self.hi[lv] } else { self.lo[lv] };
                self.state[q] = State::Basic;
                self.x[q] += dir * step;
                self.swap_basis(q, lv);
            }
            _ => {
                // bound flip
                if dir > 0.0 {
                    self.state[q] = State::Upper;
                    self.x[q] = self.hi[q];
                } else {
                    self.state[q] = State::Lower;
                    self.x[q] = self.lo[q];
                }
            }
        }
        if self.degenerate_run >= self.opts.bland_after {
            let mut h = DefaultHasher::new();
            self.state.hash(&mut h);
            if !self.stalled.insert(h.finish()) {
                return self.reset("basis repeated without progress");
            }
        } else {
            self.stalled.clear();
        }
        Step::Continue
    }

    fn swap_basis(&mut self, enter: usize, leave: usize) {
        let n = self.n;
        match (enter < n, leave < n) {
            (true, true) => {
                let c = self.pos_s[leave];
                self.basic_s[c] = enter;
                self.pos_s[leave] = NONE;
                self.pos_s[enter] = c;
            }
            (true, false) => {
                self.pos_s[enter] = self.basic_s.len();
                self.basic_s.push(enter);
                self.rows_r.push(leave - n);
            }
            (false, true) => {
                let c = self.pos_s[leave];
                let last = self.basic_s.len() - 1;
                self.basic_s.swap(c, last);
                self.pos_s[self.basic_s[c]] = c;
                self.basic_s.pop();
                self.pos_s[leave] = NONE;
                let p = self.rows_r.iter().position(|&i| i == enter - n).expect("entering logical row in R");
                self.rows_r.swap_remove(p);
            }
            (false, false) => {
                let p = self.rows_r.iter().position(|&i| i == enter - n).expect("entering logical row in R");
                self.rows_r[p] = leave - n;
            }
        }
    }

    fn reset(&mut self, why: &str) -> Step {
        self.resets += 1;
        log::debug!("simplex basis reset: {why}");
        if self.resets > 3 {
            return Step::Done(LpStatus::NumericalFailure);
        }
        let near: Vec<f64> = self.x[..self.n].to_vec();
        self.slack_basis(Some(&near));
        Step::Continue
    }

    fn unscaled(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x[j] * self.col_scale[j]).collect()
    }

    /// Runs the simplex from the current basis.
    pub fn solve(&mut self) -> LpSolution {
        self.resets = 0;
        self.degenerate_run = 0;
        self.stalled.clear();
        let start = self.iterations;
        let status = if self.presolve_infeasible {
            LpStatus::Infeasible
        } else {
            loop {
                if self.iterations - start >= self.opts.max_iters {
                    break LpStatus::IterationLimit;
                }
                match self.iterate() {
                    Step::Continue => {}
                    Step::Done(s) => break s,
                }
            }
        };
        let values = self.unscaled();
        let mut status = status;
        if status == LpStatus::Optimal {
            match check_values(&self.lp, &values, self.opts.tol_feas) {
                Ok(v) if v.is_empty() => {}
                Ok(v) => {
                    log::debug!("optimal basis fails the independent check on {} row(s)", v.len());
                    status = LpStatus::NumericalFailure;
                }
                Err(_) => status = LpStatus::NumericalFailure,
            }
        }
        let objective_value = self.lp.objective_at(&values);
        LpSolution { status, values, objective_value, iterations: self.iterations - start }
    }

    pub fn num_rows_after_presolve(&self) -> usize {
        self.row_map.len()
    }
}

/// Solves `lp`. On a numerical failure the model is retried from scratch
/// without scaling, then once more with bounds normalized by the largest
/// right-hand side.
pub fn solve_lp(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    let mut sol = Simplex::new(lp, opts)?.solve();
    let mut iterations = sol.iterations;
    if sol.status == LpStatus::NumericalFailure && opts.scaling {
        let plain = SolverOptions { scaling: false, ..opts.clone() };
        sol = Simplex::new(lp, &plain)?.solve();
        iterations += sol.iterations;
    }
    if sol.status == LpStatus::NumericalFailure {
        sol = Simplex::build(lp, opts, true)?.solve();
        iterations += sol.iterations;
    }
    sol.iterations = iterations;
    Ok(sol)
}
