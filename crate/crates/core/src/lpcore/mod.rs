//! A small linear-programming engine: model builder, bounded-variable primal
//! simplex, and an independent feasibility checker.
//!
//! ```
//! use stableset::lpcore::{LinearProgram, Relation, Sense, SolverOptions, LpStatus, solve_lp};
//!
//! let mut lp = LinearProgram::new();
//! let x = lp.add_var("x", 0.0, 1.0);
//! let y = lp.add_var("y", 0.0, 1.0);
//! lp.add_constraint("cap", &[(x, 1.0), (y, 1.0)], Relation::Le, 1.0).unwrap();
//! lp.set_objective(Sense::Maximize, &[(x, 1.0), (y, 1.0)]);
//! let sol = solve_lp(&lp, &SolverOptions::default()).unwrap();
//! assert_eq!(sol.status, LpStatus::Optimal);
//! assert!((sol.objective_value - 1.0).abs() < 1e-9);
//! ```

mod simplex;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use simplex::{solve_lp, Simplex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// `Σ coeffs · x  (rel)  rhs`. Coefficients are merged per variable and
/// stored sorted by variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(VarId, f64)>,
    pub rel: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, a)| a * x[v.0]).sum()
    }

    /// Sum of `|a_j x_j|`; the magnitude scale used for relative tolerances.
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(v, a)| (a * x[v.0]).abs()).sum()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("constraint `{constraint}` references undeclared variable #{var}")]
    UnknownVariable { constraint: String, var: usize },
    #[error("variable `{0}` has lower bound above upper bound")]
    EmptyBounds(String),
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
    #[error("variable `{0}` is not assigned")]
    Unassigned(String),
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("objective vector has {got} entries, expected {expected}")]
    ObjectiveLength { got: usize, expected: usize },
}

/// A linear program with bounded variables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub sense: Option<Sense>,
    /// Dense objective; zero when no objective is set.
    pub objective: Vec<f64>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.vars.push(Variable { name: name.into(), lower, upper });
        self.objective.push(0.0);
        VarId(self.vars.len() - 1)
    }

    pub fn add_free_var(&mut self, name: impl Into<String>) -> VarId {
        self.add_var(name, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coeffs: &[(VarId, f64)],
        rel: Relation,
        rhs: f64,
    ) -> Result<usize, LpError> {
        let name = name.into();
        let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
        for &(v, a) in coeffs {
            if v.0 >= self.vars.len() {
                return Err(LpError::UnknownVariable { constraint: name, var: v.0 });
            }
            if !a.is_finite() {
                return Err(LpError::NonFinite(name));
            }
            *merged.entry(v).or_insert(0.0) += a;
        }
        if rhs.is_nan() {
            return Err(LpError::NonFinite(name));
        }
        let coeffs = merged.into_iter().filter(|&(_, a)| a != 0.0).collect();
        self.constraints.push(Constraint { name, coeffs, rel, rhs });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, sense: Sense, coeffs: &[(VarId, f64)]) {
        self.objective = vec![0.0; self.vars.len()];
        for &(v, a) in coeffs {
            self.objective[v.0] += a;
        }
        self.sense = Some(sense);
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn constraint_by_name(&self, name: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.name == name)
    }

    pub fn validate(&self) -> Result<(), LpError> {
        for v in &self.vars {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(LpError::EmptyBounds(v.name.clone()));
            }
        }
        for c in &self.constraints {
            if let Some(&(v, _)) = c.coeffs.iter().find(|(v, _)| v.0 >= self.vars.len()) {
                return Err(LpError::UnknownVariable { constraint: c.name.clone(), var: v.0 });
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        Ok(())
    }

    /// Objective value at `x` (zero when no objective is set).
    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Plain-text dump, one constraint per line, for debugging.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let term = |out: &mut String, first: bool, a: f64, name: &str| {
            if first {
                let _ = write!(out, "{a} {name}");
            } else if a < 0.0 {
                let _ = write!(out, " - {} {name}", -a);
            } else {
                let _ = write!(out, " + {a} {name}");
            }
        };
        match self.sense {
            Some(s) => {
                let _ = write!(out, "{}:", if s == Sense::Minimize { "minimize" } else { "maximize" });
                let mut first = true;
                for (j, &c) in self.objective.iter().enumerate() {
                    if c != 0.0 {
                        out.push(' ');
                        term(&mut out, first, c, &self.vars[j].name);
                        first = false;
                    }
                }
                if first {
                    out.push_str(" 0");
                }
                out.push('\n');
            }
            None => out.push_str("feasibility\n"),
        }
        for c in &self.constraints {
            let _ = write!(out, "{}: ", c.name);
            for (i, &(v, a)) in c.coeffs.iter().enumerate() {
                term(&mut out, i == 0, a, &self.vars[v.0].name);
            }
            if c.coeffs.is_empty() {
                out.push('0');
            }
            let rel = match c.rel {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " {rel} {}", c.rhs);
        }
        for v in &self.vars {
            let _ = writeln!(out, "bounds {}: [{}, {}]", v.name, v.lower, v.upper);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The engine could not reach a point that passes the independent
    /// feasibility check, even after retrying without scaling.
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Values indexed by [`VarId`].
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn value(&self, v: VarId) -> f64 {
        self.values[v.0]
    }

    pub fn named_values(&self, lp: &LinearProgram) -> BTreeMap<String, f64> {
        lp.vars.iter().zip(&self.values).map(|(v, &x)| (v.name.clone(), x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    LowerBound,
    UpperBound,
    Constraint,
}

/// A violated bound or constraint. `slack` is negative by the violation
/// amount (for an equality, minus the absolute residual).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub kind: ViolationKind,
    pub slack: f64,
}

/// Default solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub tol_feas: f64,
    pub tol_pivot: f64,
    pub tol_dual: f64,
    pub max_iters: usize,
    pub scaling: bool,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol_feas: 1e-8,
            tol_pivot: 1e-10,
            tol_dual: 1e-9,
            max_iters: 50_000,
            scaling: true,
            bland_after: 50,
        }
    }
}

/// Bound violations use tolerance `tol·max(1, |bound|)`; a row uses
/// `tol·max(1, Σ|a_j x_j|)`.
pub fn check_values(lp: &LinearProgram, x: &[f64], tol: f64) -> Result<Vec<Violation>, LpError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(LpError::BadTolerance);
    }
    if x.len() < lp.vars.len() {
        return Err(LpError::Unassigned(lp.vars[x.len()].name.clone()));
    }
    let mut out = Vec::new();
    for (v, &xv) in lp.vars.iter().zip(x) {
        if xv.is_nan() {
            return Err(LpError::Unassigned(v.name.clone()));
        }
        if v.lower.is_finite() {
            let s = xv - v.lower;
            if s < -tol * v.lower.abs().max(1.0) {
                out.push(Violation { name: v.name.clone(), kind: ViolationKind::LowerBound, slack: s });
            }
        }
        if v.upper.is_finite() {
            let s = v.upper - xv;
            if s < -tol * v.upper.abs().max(1.0) {
                out.push(Violation { name: v.name.clone(), kind: ViolationKind::UpperBound, slack: s });
            }
        }
    }
    for c in &lp.constraints {
        let act = c.activity(x);
        let t = tol * c.magnitude(x).max(c.rhs.abs()).max(1.0);
        let slack = match c.rel {
            Relation::Le => c.rhs - act,
            Relation::Ge => act - c.rhs,
            Relation::Eq => -(act - c.rhs).abs(),
        };
        if slack < -t || slack.is_nan() {
            out.push(Violation { name: c.name.clone(), kind: ViolationKind::Constraint, slack });
        }
    }
    Ok(out)
}

/// Checks a named assignment; every variable must be present.
pub fn check_feasible(
    lp: &LinearProgram,
    point: &BTreeMap<String, f64>,
    tol: f64,
) -> Result<Vec<Violation>, LpError> {
    let x = lp
        .vars
        .iter()
        .map(|v| point.get(&v.name).copied().ok_or_else(|| LpError::Unassigned(v.name.clone())))
        .collect::<Result<Vec<f64>, _>>()?;
    check_values(lp, &x, tol)
}
