//! Step A: fit the coefficients of a linear-in-parameters cost family by
//! linear programming so that every breakup scenario costs more than the
//! integer placement, then re-verify the result by direct evaluation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costfn::{
    self, basis, basis_d2, coeff_names, convexity_measure, legacy_requirements, parse_kv, placement, CostError,
    CostParams, Family, LegacyParams, Placement, Requirement, Scenario, ScenarioQuantities,
};
use crate::lpcore::{self, LinearProgram, LpError, LpStatus, Relation, Sense, SolverOptions, VarId};

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("invalid fit configuration: {0}")]
    Config(String),
    #[error("config file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("the {0} family has no linear fitting model")]
    NotLinear(Family),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Objective {
    FeasibilityOnly,
    /// Maximize `f(1)`. The cap row `f(1) ≤ cap` is emitted in every mode.
    MaximizeF1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurvatureGrid {
    /// This many points spread evenly over `lowCurv..=intvl`.
    Subsampled(usize),
    /// Every integer `f` in `lowCurv..=intvl`.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintSubset {
    All,
    /// Only `Nkw4Diff`, `Nkw3Diff`, `Nkw2Diff`, `W3` and `V0199`.
    Critical,
}

const CRITICAL: [&str; 5] = ["Nkw4Diff", "Nkw3Diff", "Nkw2Diff", "W3", "V0199"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub n: usize,
    pub k: usize,
    pub intvl: u64,
    pub eps: f64,
    pub low_curv: u64,
    pub curv_lower_bound: f64,
    /// Shifted two-piece and equal-split rows that carry the floor share.
    pub tightened: bool,
    /// Eight-piece and two-piece rows that merge floor items.
    pub floor_rows: bool,
    /// `cost ≥ (1 + eps)·reference` instead of `cost − reference ≥ eps`.
    pub ratio_eps: bool,
    pub family: Family,
    pub convexity: bool,
    pub curvature_grid: CurvatureGrid,
    pub objective: Objective,
    pub f1_cap: f64,
    pub subset: ConstraintSubset,
    /// Replaces `lowCurv/intvl` as the floor size (used by refit sweeps).
    pub w_override: Option<f64>,
}

impl FitConfig {
    pub fn new(n: usize, k: usize, intvl: u64, eps: f64, low_curv: u64) -> Self {
        FitConfig {
            n,
            k,
            intvl,
            eps,
            low_curv,
            curv_lower_bound: 1e-8,
            tightened: false,
            floor_rows: false,
            ratio_eps: false,
            family: Family::Poly,
            convexity: true,
            curvature_grid: CurvatureGrid::Subsampled(2000),
            objective: Objective::FeasibilityOnly,
            f1_cap: 1e10,
            subset: ConstraintSubset::All,
            w_override: None,
        }
    }

    pub fn w(&self) -> f64 {
        self.w_override.unwrap_or(self.low_curv as f64 / self.intvl as f64)
    }

    pub fn quantities(&self) -> ScenarioQuantities {
        ScenarioQuantities::new(self.n, self.k, self.w())
    }

    pub fn validate(&self) -> Result<(), FitError> {
        let bad = |m: &str| Err(FitError::Config(m.to_string()));
        if self.k < 1 || self.k > self.n {
            return bad("k must satisfy 1 <= k <= N");
        }
        if self.intvl == 0 {
            return bad("intvl must be positive");
        }
        let w = self.w();
        if !(w > 0.0 && w < 1.0) {
            return bad("w = lowCurv/intvl must lie in (0, 1)");
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps must be positive");
        }
        if !(self.curv_lower_bound > 0.0) {
            return bad("curv_lower_bound must be positive");
        }
        if !(self.f1_cap.is_finite()) {
            return bad("f1 cap must be finite");
        }
        if self.family == Family::Legacy {
            return Err(FitError::NotLinear(Family::Legacy));
        }
        if let CurvatureGrid::Subsampled(0) = self.curvature_grid {
            return bad("curvature grid needs at least one point");
        }
        Ok(())
    }

    /// Parses `key=value` lines. The six model parameters use their model
    /// names (`N`, `k`, `intvl`, `eps`, `lowCurv`, `curv_lower_bound`);
    /// variant keys are `tightened`, `extra150`, `ratio_eps`, `family`,
    /// `convexity`, `curvature_grid` (a count or `full`), `objective`
    /// (`feasibility` or `max_f1`), `f1_cap`, `subset` (`all` or
    /// `critical`) and `w`.
    pub fn from_kv(text: &str) -> Result<Self, FitError> {
        let map = parse_kv(text).map_err(|e| match e {
            CostError::Parse { line, msg } => FitError::Parse { line, msg },
            other => FitError::Cost(other),
        })?;
        let mut cfg = FitConfig::new(0, 0, 100_000, 0.0, 0);
        let mut seen = [false; 5];
        for (key, (line, val)) in &map {
            let line = *line;
            let perr = |msg: String| FitError::Parse { line, msg };
            let num = || val.parse::<f64>().map_err(|_| perr(format!("`{val}` is not a number")));
            let int = || val.parse::<u64>().map_err(|_| perr(format!("`{val}` is not a non-negative integer")));
            let flag = || match val.to_ascii_lowercase().as_str() {
                "1" | "true" | "yes" | "on" => Ok(true),
                "0" | "false" | "no" | "off" => Ok(false),
                _ => Err(perr(format!("`{val}` is not a boolean"))),
            };
            match key.as_str() {
                "N" => {
                    cfg.n = int()? as usize;
                    seen[0] = true;
                }
                "k" => {
                    cfg.k = int()? as usize;
                    seen[1] = true;
                }
                "intvl" => cfg.intvl = int()?,
                "eps" => {
                    cfg.eps = num()?;
                    seen[2] = true;
                }
                "lowCurv" => {
                    cfg.low_curv = int()?;
                    seen[3] = true;
                }
                "curv_lower_bound" => cfg.curv_lower_bound = num()?,
                "tightened" => cfg.tightened = flag()?,
                "extra150" => cfg.floor_rows = flag()?,
                "ratio_eps" => cfg.ratio_eps = flag()?,
                "convexity" => cfg.convexity = flag()?,
                "family" => cfg.family = val.parse().map_err(perr)?,
                "curvature_grid" => {
                    cfg.curvature_grid = if val.eq_ignore_ascii_case("full") {
                        CurvatureGrid::Full
                    } else {
                        CurvatureGrid::Subsampled(int()? as usize)
                    }
                }
                "objective" => {
                    cfg.objective = match val.as_str() {
                        "feasibility" => Objective::FeasibilityOnly,
                        "max_f1" => Objective::MaximizeF1,
                        _ => return Err(perr(format!("unknown objective `{val}`"))),
                    }
                }
                "f1_cap" => cfg.f1_cap = num()?,
                "subset" => {
                    cfg.subset = match val.as_str() {
                        "all" => ConstraintSubset::All,
                        "critical" => ConstraintSubset::Critical,
                        _ => return Err(perr(format!("unknown subset `{val}`"))),
                    }
                }
                "w" => {
                    cfg.w_override = Some(num()?);
                    seen[4] = true;
                }
                _ => return Err(perr(format!("unknown key `{key}`"))),
            }
        }
        for (i, name) in ["N", "k", "eps"].iter().enumerate() {
            if !seen[i] {
                return Err(FitError::Config(format!("missing `{name}`")));
            }
        }
        if !seen[3] && !seen[4] {
            return Err(FitError::Config("missing `lowCurv` (or `w`)".into()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv(&self) -> String {
        let mut s = format!(
            "N={}\nk={}\nintvl={}\neps={}\nlowCurv={}\ncurv_lower_bound={:e}\n",
            self.n, self.k, self.intvl, self.eps, self.low_curv, self.curv_lower_bound
        );
        s.push_str(&format!(
            "tightened={}\nextra150={}\nratio_eps={}\nfamily={}\nconvexity={}\n",
            self.tightened, self.floor_rows, self.ratio_eps, self.family, self.convexity
        ));
        match self.curvature_grid {
            CurvatureGrid::Full => s.push_str("curvature_grid=full\n"),
            CurvatureGrid::Subsampled(p) => s.push_str(&format!("curvature_grid={p}\n")),
        }
        s.push_str(match self.objective {
            Objective::FeasibilityOnly => "objective=feasibility\n",
            Objective::MaximizeF1 => "objective=max_f1\n",
        });
        s.push_str(&format!("f1_cap={:e}\n", self.f1_cap));
        if self.subset == ConstraintSubset::Critical {
            s.push_str("subset=critical\n");
        }
        if let Some(w) = self.w_override {
            s.push_str(&format!("w={w:e}\n"));
        }
        s
    }

    /// Scenarios whose margin rows the model contains, with their placements.
    pub fn active_scenarios(&self) -> Vec<(Scenario, Placement)> {
        let sq = self.quantities();
        Scenario::all(self.floor_rows)
            .into_iter()
            .filter(|s| !(self.tightened && *s == Scenario::EqualSplit(1000)))
            .filter(|s| self.subset == ConstraintSubset::All || CRITICAL.contains(&s.name().as_str()))
            .filter_map(|s| placement(&sq, s, self.tightened).map(|p| (s, p)))
            .collect()
    }

    /// Curvature grid points `f/intvl`.
    pub fn curvature_points(&self) -> Vec<(u64, f64)> {
        if !self.convexity {
            return Vec::new();
        }
        let (lo, hi) = (self.low_curv.max(1), self.intvl);
        let fs: Vec<u64> = match self.curvature_grid {
            CurvatureGrid::Full => (lo..=hi).collect(),
            CurvatureGrid::Subsampled(p) => {
                let span = hi - lo;
                if p as u64 > span {
                    (lo..=hi).collect()
                } else if p == 1 {
                    vec![lo]
                } else {
                    let mut v: Vec<u64> = (0..p)
                        .map(|i| lo + ((i as u128 * span as u128) / (p as u128 - 1)) as u64)
                        .collect();
                    v.dedup();
                    v
                }
            }
        };
        fs.into_iter().map(|f| (f, f as f64 / self.intvl as f64)).collect()
    }
}

/// Defines an auxiliary variable through a row `Σ a·x − aux = 0` whose other
/// variables are already known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxDef {
    pub var: VarId,
    pub row: usize,
}

/// The built fitting LP with the handles needed to read and complete points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitModel {
    pub lp: LinearProgram,
    pub family: Family,
    pub w: f64,
    pub coeffs: Vec<VarId>,
    /// In dependency order.
    pub aux: Vec<AuxDef>,
}

impl FitModel {
    /// Full assignment for `params`: coefficients copied, every auxiliary
    /// evaluated from its definition row.
    pub fn complete_point(&self, params: &CostParams) -> Result<BTreeMap<String, f64>, FitError> {
        if params.family() != self.family {
            return Err(FitError::Config(format!("expected {} parameters", self.family)));
        }
        let mut x = vec![f64::NAN; self.lp.num_vars()];
        for (v, c) in self.coeffs.iter().zip(params.coeffs()) {
            x[v.0] = c;
        }
        for d in &self.aux {
            let row = &self.lp.constraints[d.row];
            let mut own = 0.0;
            let terms: Vec<f64> = row
                .coeffs
                .iter()
                .filter_map(|&(v, a)| {
                    if v == d.var {
                        own = a;
                        None
                    } else {
                        Some(a * x[v.0])
                    }
                })
                .collect();
            x[d.var.0] = (row.rhs - costfn::compensated_sum(terms)) / own;
        }
        Ok(self.lp.vars.iter().zip(x).map(|(v, val)| (v.name.clone(), val)).collect())
    }
}

struct Builder {
    lp: LinearProgram,
    theta: Vec<VarId>,
    aux: Vec<AuxDef>,
    family: Family,
}

impl Builder {
    fn f_terms(&self, weight: f64, x: f64) -> Vec<(VarId, f64)> {
        self.theta.iter().zip(basis(self.family, x)).map(|(&v, b)| (v, weight * b)).collect()
    }

    fn define(&mut self, name: &str, mut terms: Vec<(VarId, f64)>) -> VarId {
        let v = self.lp.add_free_var(name);
        terms.push((v, -1.0));
        let row = self.lp.add_constraint(format!("{name}_def"), &terms, Relation::Eq, 0.0).expect("declared vars");
        self.aux.push(AuxDef { var: v, row });
        v
    }
}

/// Builds the fitting LP for `cfg`.
///
/// Variables: the family's coefficients, `func1 = f(1)`, `funcW = f(w)`,
/// `desiredCost`, and one auxiliary per active scenario holding
/// `cost − reference`. Rows: definitions, the `func1Limit` cap, one margin
/// row per active scenario, and (with convexity) one `curvature[f]` row per
/// grid point requiring `f''(f/intvl) ≥ curv_lower_bound`.
pub fn build_fit_lp(cfg: &FitConfig) -> Result<FitModel, FitError> {
    build_boosted(cfg, &BTreeMap::new())
}

/// The fitting model with `boost[row]` added to the right-hand side of the
/// named margin and curvature rows.
fn build_boosted(cfg: &FitConfig, boost: &BTreeMap<String, f64>) -> Result<FitModel, FitError> {
    cfg.validate()?;
    let extra = |row: &str| boost.get(row).copied().unwrap_or(0.0);
    let family = cfg.family;
    let w = cfg.w();
    let mut b = Builder { lp: LinearProgram::new(), theta: Vec::new(), aux: Vec::new(), family };
    b.theta = coeff_names(family).iter().map(|n| b.lp.add_free_var(*n)).collect();

    let f1_terms = b.f_terms(1.0, 1.0);
    let func1 = b.define("func1", f1_terms);
    let fw_terms = b.f_terms(1.0, w);
    let func_w = b.define("funcW", fw_terms);
    let (n, k) = (cfg.n as f64, cfg.k as f64);
    let desired = b.define("desiredCost", vec![(func1, k), (func_w, n - k)]);
    b.lp.add_constraint("func1Limit", &[(func1, 1.0)], Relation::Le, cfg.f1_cap)?;

    let reference_terms = |p: &Placement| -> Vec<(VarId, f64)> {
        p.reference
            .iter()
            .map(|&(c, x)| if x == 1.0 { (func1, c) } else { (func_w, c) })
            .collect()
    };

    for (s, p) in cfg.active_scenarios() {
        let name = s.name();
        let mut terms = Vec::new();
        for &(c, x) in &p.cost {
            terms.extend(b.f_terms(c, x));
        }
        let refs = reference_terms(&p);
        terms.extend(refs.iter().map(|&(v, c)| (v, -c)));
        let aux = b.define(&name, terms);
        let m = p.margin_factor * cfg.eps;
        let lift = extra(&name);
        if cfg.ratio_eps {
            let mut row = vec![(aux, 1.0)];
            row.extend(refs.iter().map(|&(v, c)| (v, -m * c)));
            b.lp.add_constraint(format!("{name}_margin"), &row, Relation::Ge, lift)?;
        } else {
            b.lp.add_constraint(format!("{name}_margin"), &[(aux, 1.0)], Relation::Ge, m + lift)?;
        }
    }
    if cfg.ratio_eps {
        b.lp.add_constraint("desiredCost_positive", &[(desired, 1.0)], Relation::Ge, 1.0 + extra("desiredCost_positive"))?;
        b.lp.add_constraint("func1_positive", &[(func1, 1.0)], Relation::Ge, 1.0)?;
        b.lp.add_constraint("funcW_positive", &[(func_w, 1.0)], Relation::Ge, 1.0)?;
    }
    for (f, x) in cfg.curvature_points() {
        let row: Vec<(VarId, f64)> = b.theta.iter().zip(basis_d2(family, x)).map(|(&v, d)| (v, d)).collect();
        let name = format!("curvature[{f}]");
        let rhs = cfg.curv_lower_bound + extra(&name);
        b.lp.add_constraint(name, &row, Relation::Ge, rhs)?;
    }
    match cfg.objective {
        Objective::FeasibilityOnly => {}
        Objective::MaximizeF1 => b.lp.set_objective(Sense::Maximize, &[(func1, 1.0)]),
    }
    Ok(FitModel { lp: b.lp, family, w, coeffs: b.theta, aux: b.aux })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitStatus {
    /// LP solved and every row re-verified by direct evaluation.
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
    /// LP reported optimal but direct evaluation found violated rows.
    VerificationFailed,
}

/// A row that direct evaluation finds violated: `value < required − tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamViolation {
    pub row: String,
    pub value: f64,
    pub required: f64,
    pub tol: f64,
}

impl ParamViolation {
    pub fn fails(&self) -> bool {
        self.value < self.required - self.tol || self.value.is_nan()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureSummary {
    pub points: usize,
    pub min_value: f64,
    pub argmin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub status: FitStatus,
    pub lp_status: LpStatus,
    pub params: Option<CostParams>,
    /// Display quantities: `desiredCost`, `func1`, `funcW` and every scenario
    /// auxiliary, as returned by the LP.
    pub quantities: BTreeMap<String, f64>,
    pub violations: Vec<ParamViolation>,
    pub curvature: Option<CurvatureSummary>,
    pub rows: usize,
    /// Margin-inflation rounds after the first solve.
    pub refits: usize,
    pub iterations: usize,
}

/// Rounds of margin inflation after the first solve.
const REFIT_ROUNDS: usize = 4;

/// Solves the fitting LP and re-verifies the solution with costfn.
///
/// The LP meets its rows only up to the solver tolerance, and a margin
/// evaluated from large coefficients can fall short by cancellation. Rows
/// that direct evaluation finds short of their requirement (with no
/// tolerance) get their right-hand side raised by twice the shortfall (plus a
/// relative `1e−9`) and
/// the model is solved again, up to four times. A raised model that turns
/// infeasible leaves the previous solution in place.
pub fn fit_parameters(cfg: &FitConfig) -> Result<FitReport, FitError> {
    let opts = SolverOptions { max_iters: 200_000, ..SolverOptions::default() };
    let mut boost: BTreeMap<String, f64> = BTreeMap::new();
    let mut best: Option<FitReport> = None;
    let mut iterations = 0;
    for round in 0..=REFIT_ROUNDS {
        let model = build_boosted(cfg, &boost)?;
        let sol = lpcore::solve_lp(&model.lp, &opts)?;
        iterations += sol.iterations;
        if sol.status != LpStatus::Optimal {
            if let Some(mut r) = best {
                r.iterations = iterations;
                return Ok(r);
            }
            return Ok(FitReport {
                status: match sol.status {
                    LpStatus::Infeasible => FitStatus::Infeasible,
                    LpStatus::Unbounded => FitStatus::Unbounded,
                    LpStatus::IterationLimit => FitStatus::IterationLimit,
                    _ => FitStatus::NumericalFailure,
                },
                lp_status: sol.status,
                params: None,
                quantities: BTreeMap::new(),
                violations: Vec::new(),
                curvature: None,
                rows: model.lp.num_constraints(),
                refits: round,
                iterations,
            });
        }
        let theta: Vec<f64> = model.coeffs.iter().map(|&v| sol.value(v)).collect();
        let params = CostParams::from_coeffs(cfg.family, &theta, cfg.w()).expect("coefficient count");
        let checks = row_checks(&params, cfg)?;
        let violations: Vec<ParamViolation> = checks.iter().filter(|c| c.fails()).cloned().collect();
        let report = FitReport {
            status: if violations.is_empty() { FitStatus::Optimal } else { FitStatus::VerificationFailed },
            lp_status: sol.status,
            quantities: model.aux.iter().map(|d| (model.lp.vars[d.var.0].name.clone(), sol.value(d.var))).collect(),
            violations,
            curvature: curvature_summary(&params, cfg)?,
            params: Some(params),
            rows: model.lp.num_constraints(),
            refits: round,
            iterations,
        };
        let short: Vec<&ParamViolation> = checks.iter().filter(|c| c.value < c.required).collect();
        best = Some(report);
        if short.is_empty() || round == REFIT_ROUNDS {
            break;
        }
        for c in short {
            *boost.entry(c.row.clone()).or_insert(0.0) += 2.0 * (c.required - c.value) + 1e-9 * (1.0 + c.required.abs());
        }
    }
    let mut r = best.expect("at least one solve");
    r.iterations = iterations;
    Ok(r)
}

fn curvature_summary(params: &CostParams, cfg: &FitConfig) -> Result<Option<CurvatureSummary>, CostError> {
    let pts = cfg.curvature_points();
    if pts.is_empty() {
        return Ok(None);
    }
    let mut best = (f64::INFINITY, 0.0);
    for &(_, x) in &pts {
        let v = params.second_derivative(x)?;
        if v < best.0 {
            best = (v, x);
        }
    }
    Ok(Some(CurvatureSummary { points: pts.len(), min_value: best.0, argmin: best.1 }))
}

fn magnitude(params: &CostParams, terms: &[(f64, f64)]) -> Result<f64, CostError> {
    terms.iter().map(|&(c, x)| params.eval(x).map(|v| (c * v).abs())).sum()
}

/// Evaluates every margin row of `cfg`'s model (and its curvature rows when
/// convexity is on) at exact points via costfn.
///
/// A margin row passes when `gap ≥ factor·eps − tol` (difference mode) or
/// `cost ≥ (1 + factor·eps)·reference − tol` (ratio mode), with
/// `tol = 1e−6 + 1e−12·Σ|terms|`. A curvature row passes when
/// `f'' ≥ curv_lower_bound − tol` with `tol = 1e−12·Σ|θ_i·d2_i| + 1e−3·curv_lower_bound`.
pub fn verify_parameters(params: &CostParams, cfg: &FitConfig) -> Result<Vec<ParamViolation>, FitError> {
    Ok(row_checks(params, cfg)?.into_iter().filter(ParamViolation::fails).collect())
}

/// Every checked row with its value, requirement and tolerance.
fn row_checks(params: &CostParams, cfg: &FitConfig) -> Result<Vec<ParamViolation>, FitError> {
    if params.family() != cfg.family {
        return Err(FitError::Config(format!(
            "parameters are {} but the configuration expects {}",
            params.family(),
            cfg.family
        )));
    }
    let params = params.with_w(cfg.w());
    let mut out = Vec::new();
    for (s, p) in cfg.active_scenarios() {
        let cost = params.weighted(&p.cost)?;
        let reference = params.weighted(&p.reference)?;
        let scale = magnitude(&params, &p.cost)? + magnitude(&params, &p.reference)?;
        let tol = 1e-6 + 1e-12 * scale;
        let m = p.margin_factor * cfg.eps;
        let (value, required) = if cfg.ratio_eps { (cost, (1.0 + m) * reference) } else { (cost - reference, m) };
        out.push(ParamViolation { row: s.name(), value, required, tol });
    }
    if cfg.ratio_eps {
        let d = params.desired_cost(cfg.n, cfg.k)?;
        out.push(ParamViolation { row: "desiredCost_positive".into(), value: d, required: 1.0, tol: 1e-9 });
    }
    let theta = params.coeffs();
    for (f, x) in cfg.curvature_points() {
        let v = params.second_derivative(x)?;
        let scale: f64 = theta.iter().zip(basis_d2(cfg.family, x)).map(|(t, d)| (t * d).abs()).sum();
        let tol = 1e-12 * scale + 1e-3 * cfg.curv_lower_bound;
        out.push(ParamViolation { row: format!("curvature[{f}]"), value: v, required: cfg.curv_lower_bound, tol });
    }
    Ok(out)
}

/// Geometric grid `start·ratio^i` for `i = 0..count`.
pub fn geometric_grid(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count as i32).map(|i| start * ratio.powi(i)).collect()
}

/// Per-parameter grids for the legacy family scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegacyGrid {
    pub n: usize,
    pub k: usize,
    pub p: Vec<f64>,
    pub t: Vec<f64>,
    pub m: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    /// Maximum number of grid points evaluated.
    pub budget: usize,
    pub subintervals: usize,
}

impl LegacyGrid {
    pub fn len(&self) -> usize {
        [&self.p, &self.t, &self.m, &self.r, &self.s, &self.y, &self.w].iter().map(|v| v.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point number `idx` in row-major order (`p` slowest, `w` fastest).
    pub fn point(&self, mut idx: usize) -> LegacyParams {
        let axes = [&self.w, &self.y, &self.s, &self.r, &self.m, &self.t, &self.p];
        let mut pick = [0.0; 7];
        for (slot, axis) in pick.iter_mut().zip(axes) {
            *slot = axis[idx % axis.len()];
            idx /= axis.len();
        }
        LegacyParams { w: pick[0], y: pick[1], s: pick[2], r: pick[3], m: pick[4], t: pick[5], p: pick[6] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegacyHit {
    pub params: LegacyParams,
    pub convexity: (usize, usize),
    pub requirements: Vec<Requirement>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegacySearch {
    pub hits: Vec<LegacyHit>,
    pub evaluated: usize,
    pub domain_errors: usize,
    pub truncated: bool,
}

/// Scans the grid for legacy functions meeting every breakup requirement and
/// the empty-bin condition; hits carry their convexity measure on `[w, 1]`.
/// Points whose evaluation leaves the domain are skipped and counted.
pub fn grid_search_legacy(grid: &LegacyGrid) -> LegacySearch {
    let total = grid.len();
    let evaluated = total.min(grid.budget);
    let results: Vec<Result<Option<LegacyHit>, ()>> = (0..evaluated)
        .into_par_iter()
        .map(|i| {
            let lp = grid.point(i);
            let params = CostParams::Legacy(lp);
            let reqs = legacy_requirements(&params, grid.n, grid.k).map_err(|_| ())?;
            if !reqs.iter().all(Requirement::holds) {
                return Ok(None);
            }
            let convexity = convexity_measure(&params, lp.w, 1.0, grid.subintervals, None).map_err(|_| ())?;
            Ok(Some(LegacyHit { params: lp, convexity, requirements: reqs }))
        })
        .collect();
    let domain_errors = results.iter().filter(|r| r.is_err()).count();
    let hits = results.into_iter().filter_map(|r| r.ok().flatten()).collect();
    LegacySearch { hits, evaluated, domain_errors, truncated: evaluated < total }
}
