//! Surrogate cost functions and the breakup scenarios they must separate.
//!
//! Three families are supported:
//!
//! * `Poly`: `C + Σ a_i x^i + Σ b_i / x^i` for `i = 1..4`,
//! * `Frac`: `C + Σ a_i x^i + b2 x^(1/2) + b3 x^(1/3) + b4 x^(1/4)`,
//! * `Legacy`: `[t + M x + r (1 − x) + y / (x + s)]^p`.
//!
//! `Poly` and `Frac` are linear in their coefficients, which is what makes
//! the parameter fit a linear program; [`basis`] and [`basis_d2`] expose the
//! per-coefficient terms.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("x = {x} is outside the domain of the {family} family")]
    Domain { x: f64, family: Family },
    #[error("legacy base is negative ({base}) at x = {x} with non-integer p")]
    NegativeBase { x: f64, base: f64 },
    #[error("parameter file line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Poly,
    Frac,
    Legacy,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Poly => "poly",
            Family::Frac => "frac",
            Family::Legacy => "legacy",
        })
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "poly" => Ok(Family::Poly),
            "frac" => Ok(Family::Frac),
            "legacy" => Ok(Family::Legacy),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

/// `C + a1 x + a2 x² + a3 x³ + a4 x⁴ + b1/x + b2/x² + b3/x³ + b4/x⁴`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyParams {
    pub c: f64,
    pub a: [f64; 4],
    pub b: [f64; 4],
    pub w: f64,
}

/// `C + a1 x + ... + a4 x⁴ + b2 x^(1/2) + b3 x^(1/3) + b4 x^(1/4)`.
/// `b[0]` holds b2.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FracParams {
    pub c: f64,
    pub a: [f64; 4],
    pub b: [f64; 3],
    pub w: f64,
}

/// `[t + M x + r (1 − x) + y / (x + s)]^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegacyParams {
    pub p: f64,
    pub t: f64,
    pub m: f64,
    pub r: f64,
    pub s: f64,
    pub y: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum CostParams {
    Poly(PolyParams),
    Frac(FracParams),
    Legacy(LegacyParams),
}

/// Legacy evaluation refuses points this close to the pole at `x = −s`.
pub const LEGACY_POLE_GAP: f64 = 1e-9;

/// Neumaier-compensated sum.
pub fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Number of linear coefficients of a linear-in-parameters family.
pub fn num_coeffs(family: Family) -> usize {
    match family {
        Family::Poly => 9,
        Family::Frac => 8,
        Family::Legacy => 0,
    }
}

/// Coefficient names in [`basis`] order.
pub fn coeff_names(family: Family) -> &'static [&'static str] {
    match family {
        Family::Poly => &["C", "a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"],
        Family::Frac => &["C", "a1", "a2", "a3", "a4", "b2", "b3", "b4"],
        Family::Legacy => &[],
    }
}

/// Value of each coefficient's term at `x`, so that `f(x) = θ · basis(x)`.
pub fn basis(family: Family, x: f64) -> Vec<f64> {
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);
    match family {
        Family::Poly => vec![1.0, x, x2, x3, x4, 1.0 / x, 1.0 / x2, 1.0 / x3, 1.0 / x4],
        Family::Frac => vec![1.0, x, x2, x3, x4, x.sqrt(), x.cbrt(), x.sqrt().sqrt()],
        Family::Legacy => Vec::new(),
    }
}

/// Second derivative of each coefficient's term at `x`.
pub fn basis_d2(family: Family, x: f64) -> Vec<f64> {
    match family {
        Family::Poly => vec![
            0.0,
            0.0,
            2.0,
            6.0 * x,
            12.0 * x * x,
            2.0 / x.powi(3),
            6.0 / x.powi(4),
            12.0 / x.powi(5),
            20.0 / x.powi(6),
        ],
        Family::Frac => vec![
            0.0,
            0.0,
            2.0,
            6.0 * x,
            12.0 * x * x,
            -0.25 * x.powf(-1.5),
            -2.0 / 9.0 * x.powf(-5.0 / 3.0),
            -3.0 / 16.0 * x.powf(-1.75),
        ],
        Family::Legacy => Vec::new(),
    }
}

fn basis_d1(family: Family, x: f64) -> Vec<f64> {
    match family {
        Family::Poly => vec![
            0.0,
            1.0,
            2.0 * x,
            3.0 * x * x,
            4.0 * x.powi(3),
            -1.0 / (x * x),
            -2.0 / x.powi(3),
            -3.0 / x.powi(4),
            -4.0 / x.powi(5),
        ],
        Family::Frac => vec![
            0.0,
            1.0,
            2.0 * x,
            3.0 * x * x,
            4.0 * x.powi(3),
            0.5 * x.powf(-0.5),
            1.0 / 3.0 * x.powf(-2.0 / 3.0),
            0.25 * x.powf(-0.75),
        ],
        Family::Legacy => Vec::new(),
    }
}

impl CostParams {
    pub fn family(&self) -> Family {
        match self {
            CostParams::Poly(_) => Family::Poly,
            CostParams::Frac(_) => Family::Frac,
            CostParams::Legacy(_) => Family::Legacy,
        }
    }

    pub fn w(&self) -> f64 {
        match self {
            CostParams::Poly(p) => p.w,
            CostParams::Frac(p) => p.w,
            CostParams::Legacy(p) => p.w,
        }
    }

    pub fn with_w(mut self, w: f64) -> Self {
        match &mut self {
            CostParams::Poly(p) => p.w = w,
            CostParams::Frac(p) => p.w = w,
            CostParams::Legacy(p) => p.w = w,
        }
        self
    }

    /// Coefficients in [`basis`] order (empty for the legacy family).
    pub fn coeffs(&self) -> Vec<f64> {
        match self {
            CostParams::Poly(p) => {
                let mut v = vec![p.c];
                v.extend(p.a);
                v.extend(p.b);
                v
            }
            CostParams::Frac(p) => {
                let mut v = vec![p.c];
                v.extend(p.a);
                v.extend(p.b);
                v
            }
            CostParams::Legacy(_) => Vec::new(),
        }
    }

    /// Rebuilds parameters from coefficients in [`basis`] order.
    pub fn from_coeffs(family: Family, theta: &[f64], w: f64) -> Option<Self> {
        match family {
            Family::Poly if theta.len() == 9 => Some(CostParams::Poly(PolyParams {
                c: theta[0],
                a: [theta[1], theta[2], theta[3], theta[4]],
                b: [theta[5], theta[6], theta[7], theta[8]],
                w,
            })),
            Family::Frac if theta.len() == 8 => Some(CostParams::Frac(FracParams {
                c: theta[0],
                a: [theta[1], theta[2], theta[3], theta[4]],
                b: [theta[5], theta[6], theta[7]],
                w,
            })),
            _ => None,
        }
    }

    fn check_domain(&self, x: f64) -> Result<(), CostError> {
        let bad = !x.is_finite()
            || match self {
                CostParams::Poly(p) => x <= 0.0 && p.b.iter().any(|&b| b != 0.0),
                CostParams::Frac(p) => x < 0.0 && p.b.iter().any(|&b| b != 0.0),
                CostParams::Legacy(p) => (x + p.s).abs() < LEGACY_POLE_GAP,
            };
        if bad {
            Err(CostError::Domain { x, family: self.family() })
        } else {
            Ok(())
        }
    }

    fn linear_terms(&self, x: f64, d: u8) -> f64 {
        let fam = self.family();
        let b = match d {
            0 => basis(fam, x),
            1 => basis_d1(fam, x),
            _ => basis_d2(fam, x),
        };
        compensated_sum(self.coeffs().iter().zip(b).filter(|(c, _)| **c != 0.0).map(|(c, t)| c * t))
    }

    /// `(g, g', g'')` for the legacy base `g(x) = t + Mx + r(1−x) + y/(x+s)`.
    fn legacy_base(p: &LegacyParams, x: f64) -> (f64, f64, f64) {
        let u = x + p.s;
        let g = compensated_sum([p.t, p.m * x, p.r * (1.0 - x), p.y / u]);
        (g, p.m - p.r - p.y / (u * u), 2.0 * p.y / (u * u * u))
    }

    fn legacy_pow(g: f64, e: f64, x: f64) -> Result<f64, CostError> {
        if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
            Ok(g.powi(e as i32))
        } else if g < 0.0 {
            Err(CostError::NegativeBase { x, base: g })
        } else {
            Ok(g.powf(e))
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64, CostError> {
        self.check_domain(x)?;
        match self {
            CostParams::Legacy(p) => {
                let (g, _, _) = Self::legacy_base(p, x);
                Self::legacy_pow(g, p.p, x)
            }
            _ => Ok(self.linear_terms(x, 0)),
        }
    }

    pub fn derivative(&self, x: f64) -> Result<f64, CostError> {
        self.check_domain(x)?;
        if matches!(self, CostParams::Poly(_)) && x <= 0.0 {
            return Err(CostError::Domain { x, family: Family::Poly });
        }
        match self {
            CostParams::Legacy(p) => {
                let (g, g1, _) = Self::legacy_base(p, x);
                Ok(p.p * Self::legacy_pow(g, p.p - 1.0, x)? * g1)
            }
            _ => Ok(self.linear_terms(x, 1)),
        }
    }

    /// Analytic second derivative; requires `x > 0` for the linear families.
    pub fn second_derivative(&self, x: f64) -> Result<f64, CostError> {
        self.check_domain(x)?;
        if !matches!(self, CostParams::Legacy(_)) && x <= 0.0 {
            return Err(CostError::Domain { x, family: self.family() });
        }
        match self {
            CostParams::Legacy(p) => {
                let (g, g1, g2) = Self::legacy_base(p, x);
                let a = if p.p == 1.0 { 0.0 } else { p.p * (p.p - 1.0) * Self::legacy_pow(g, p.p - 2.0, x)? * g1 * g1 };
                Ok(a + p.p * Self::legacy_pow(g, p.p - 1.0, x)? * g2)
            }
            _ => Ok(self.linear_terms(x, 2)),
        }
    }

    /// `k·f(1) + (N−k)·f(w)`.
    pub fn desired_cost(&self, n: usize, k: usize) -> Result<f64, CostError> {
        let f1 = self.eval(1.0)?;
        let fw = self.eval(self.w())?;
        Ok(k as f64 * f1 + (n - k) as f64 * fw)
    }

    /// Evaluates `Σ weight · f(x)` over `(weight, x)` terms.
    pub fn weighted(&self, terms: &[(f64, f64)]) -> Result<f64, CostError> {
        let vals = terms.iter().map(|&(c, x)| self.eval(x).map(|v| c * v)).collect::<Result<Vec<_>, _>>()?;
        Ok(compensated_sum(vals))
    }

    /// Flat `key=value` text: `family`, `w`, then the family's coefficients.
    pub fn to_kv(&self) -> String {
        let mut out = format!("family={}\n", self.family());
        match self {
            CostParams::Legacy(p) => {
                for (k, v) in [("p", p.p), ("t", p.t), ("M", p.m), ("r", p.r), ("s", p.s), ("y", p.y)] {
                    out.push_str(&format!("{k}={v:e}\n"));
                }
            }
            _ => {
                for (k, v) in coeff_names(self.family()).iter().zip(self.coeffs()) {
                    out.push_str(&format!("{k}={v:e}\n"));
                }
            }
        }
        out.push_str(&format!("w={:e}\n", self.w()));
        out
    }

    /// Parses the `key=value` format written by [`CostParams::to_kv`].
    /// Missing coefficients default to zero; `family` defaults to `poly`.
    pub fn from_kv(text: &str) -> Result<Self, CostError> {
        let map = parse_kv(text)?;
        let err = |line: usize, msg: String| CostError::Parse { line, msg };
        let family = match map.get("family") {
            Some((line, v)) => v.parse::<Family>().map_err(|m| err(*line, m))?,
            None => Family::Poly,
        };
        let allowed: Vec<&str> = match family {
            Family::Legacy => vec!["p", "t", "M", "r", "s", "y"],
            f => coeff_names(f).to_vec(),
        };
        let mut nums = BTreeMap::new();
        for (key, (line, val)) in &map {
            if key == "family" {
                continue;
            }
            if key != "w" && !allowed.contains(&key.as_str()) {
                return Err(err(*line, format!("key `{key}` does not belong to the {family} family")));
            }
            let v: f64 = val.parse().map_err(|_| err(*line, format!("`{val}` is not a number")))?;
            if !v.is_finite() {
                return Err(err(*line, format!("`{key}` is not finite")));
            }
            nums.insert(key.clone(), v);
        }
        let get = |k: &str| nums.get(k).copied().unwrap_or(0.0);
        let w = get("w");
        if !(0.0..1.0).contains(&w) {
            return Err(err(map.get("w").map_or(0, |x| x.0), format!("w = {w} outside [0, 1)")));
        }
        Ok(match family {
            Family::Legacy => CostParams::Legacy(LegacyParams {
                p: nums.get("p").copied().unwrap_or(1.0),
                t: get("t"),
                m: get("M"),
                r: get("r"),
                s: get("s"),
                y: get("y"),
                w,
            }),
            f => {
                let theta: Vec<f64> = coeff_names(f).iter().map(|k| get(k)).collect();
                CostParams::from_coeffs(f, &theta, w).expect("coefficient count matches family")
            }
        })
    }
}

/// Parses `key=value` lines (`#` comments, optional trailing `;`).
/// Returns each key with the line it was found on.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, (usize, String)>, CostError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim().trim_end_matches(';').trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CostError::Parse { line: i + 1, msg: format!("expected key=value, got `{line}`") });
        };
        let key = k.trim().trim_start_matches("param ").trim().trim_end_matches(':').trim().to_string();
        if map.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
            return Err(CostError::Parse { line: i + 1, msg: format!("duplicate key `{key}`") });
        }
    }
    Ok(map)
}

/// Midpoint-convexity count over `subintervals` equal pieces of `[lo, hi]`.
///
/// A piece `[u, v]` counts when `f((u+v)/2) ≤ (f(u) + f(v))/2 + tol`. The
/// default tolerance is `1e−12·max(1, |f(lo)|, |f(hi)|)`. Returns
/// `(numerator, denominator)`.
pub fn convexity_measure(
    params: &CostParams,
    lo: f64,
    hi: f64,
    subintervals: usize,
    tol: Option<f64>,
) -> Result<(usize, usize), CostError> {
    let f_lo = params.eval(lo)?;
    let f_hi = params.eval(hi)?;
    let tol = tol.unwrap_or(1e-12 * f_lo.abs().max(f_hi.abs()).max(1.0));
    let h = (hi - lo) / subintervals as f64;
    let mut prev = f_lo;
    let mut count = 0;
    for i in 0..subintervals {
        let u = lo + i as f64 * h;
        let v = if i + 1 == subintervals { hi } else { lo + (i + 1) as f64 * h };
        let fv = params.eval(v)?;
        let mid = params.eval(0.5 * (u + v))?;
        if mid <= 0.5 * (prev + fv) + tol {
            count += 1;
        }
        prev = fv;
    }
    Ok((count, subintervals))
}

/// Instance-shape quantities shared by all scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioQuantities {
    pub n: usize,
    pub k: usize,
    pub w: f64,
}

impl ScenarioQuantities {
    pub fn new(n: usize, k: usize, w: f64) -> Self {
        ScenarioQuantities { n, k, w }
    }

    /// `w(N−k)/N + k/N`: every bin holding the same amount.
    pub fn equal_wt(&self) -> f64 {
        let (n, k) = (self.n as f64, self.k as f64);
        self.w * (n - k) / n + k / n
    }

    /// `(N−k)w/(N−mk)`, defined only when `N > mk`.
    pub fn nkw(&self, m: u32) -> Option<f64> {
        let mk = m as usize * self.k;
        (self.n > mk).then(|| (self.n - self.k) as f64 * self.w / (self.n - mk) as f64)
    }
}

/// Piece counts of the redistribution scenarios.
pub const NKW_PIECES: [u32; 7] = [12, 8, 6, 5, 4, 3, 2];
/// Small-piece sizes of the two-piece splits.
pub const TWO_PIECE_SIZES: [f64; 6] = [0.001, 0.01, 0.02, 0.05, 0.15, 0.3];
/// Piece counts of the equal splits.
pub const EQUAL_SPLITS: [u32; 8] = [2, 3, 4, 5, 10, 20, 100, 1000];

/// A non-integer placement that the fitted function must make more
/// expensive than its integer counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scenario {
    /// All `N` bins hold `equalWt`.
    EqualWeight,
    /// Every unit item broken into `m` pieces of `1/m`; the floor mass is
    /// spread evenly over the remaining `N − mk` bins.
    Nkw(u32),
    /// One unit item split into `a` and `1 − a`.
    TwoPiece(f64),
    /// One unit item split into `m` equal pieces.
    EqualSplit(u32),
    /// One unit item and seven floor items merged into eight equal bins.
    EightPieceFloor,
    /// One unit item and one floor item merged into two equal bins.
    TwoPieceFloor,
}

/// Guard threshold printed in the fitting model for each redistribution.
fn nkw_threshold(m: u32) -> f64 {
    match m {
        12 => 0.083333,
        8 => 0.125,
        6 => 0.16667,
        5 => 0.2,
        4 => 0.25,
        3 => 0.3333,
        _ => 0.5,
    }
}

/// Guard threshold printed in the fitting model for each equal split.
fn split_threshold(m: u32) -> f64 {
    match m {
        3 => 0.33333,
        m => 1.0 / m as f64,
    }
}

impl Scenario {
    /// Row name, matching the fitting model's display names.
    pub fn name(&self) -> String {
        match *self {
            Scenario::EqualWeight => "equalWeightDiff".into(),
            Scenario::Nkw(m) => format!("Nkw{m}Diff"),
            Scenario::TwoPiece(a) => {
                let lo = format!("{a}").trim_start_matches("0.").to_string();
                let hi = format!("{}", ((1.0 - a) * 1e6).round() / 1e6).trim_start_matches("0.").to_string();
                format!("V{lo}{hi}")
            }
            Scenario::EqualSplit(m) => format!("W{m}"),
            Scenario::EightPieceFloor => "eightPieceFloor".into(),
            Scenario::TwoPieceFloor => "twoPieceFloor".into(),
        }
    }

    /// Every scenario of the fitting model, in model order.
    pub fn all(extra_floor_rows: bool) -> Vec<Scenario> {
        let mut v = vec![Scenario::EqualWeight];
        v.extend(NKW_PIECES.iter().map(|&m| Scenario::Nkw(m)));
        v.extend(TWO_PIECE_SIZES.iter().map(|&a| Scenario::TwoPiece(a)));
        v.extend(EQUAL_SPLITS.iter().map(|&m| Scenario::EqualSplit(m)));
        if extra_floor_rows {
            v.push(Scenario::EightPieceFloor);
            v.push(Scenario::TwoPieceFloor);
        }
        v
    }
}

/// The two sides of a separation requirement as `(weight, x)` terms:
/// `Σ cost ≥ Σ reference + margin_factor · eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub cost: Vec<(f64, f64)>,
    pub reference: Vec<(f64, f64)>,
    pub margin_factor: f64,
}

/// Placement of `scenario`, or `None` when its guard is false for this
/// shape. `shifted` selects the variant in which each unit-item piece also
/// carries its bin's floor share, compared against `f(1) + (pieces−1)·f(w)`.
pub fn placement(sq: &ScenarioQuantities, scenario: Scenario, shifted: bool) -> Option<Placement> {
    let (n, k, w) = (sq.n as f64, sq.k as f64, sq.w);
    let desired = vec![(k, 1.0), (n - k, w)];
    let p = |cost, reference| Some(Placement { cost, reference, margin_factor: 1.0 });
    match scenario {
        Scenario::EqualWeight => p(vec![(n, sq.equal_wt())], desired),
        Scenario::Nkw(m) => {
            let x = sq.nkw(m)?;
            if x > 1.0 || nkw_threshold(m) < w {
                return None;
            }
            let mk = m as f64 * k;
            p(vec![(n - mk, x), (mk, 1.0 / m as f64)], desired)
        }
        Scenario::TwoPiece(a) => {
            if a < w {
                return None;
            }
            if shifted {
                p(vec![(1.0, a + w / 2.0), (1.0, 1.0 - a + w / 2.0)], vec![(1.0, 1.0), (1.0, w)])
            } else {
                p(vec![(1.0, a), (1.0, 1.0 - a)], vec![(1.0, 1.0)])
            }
        }
        Scenario::EqualSplit(m) => {
            if split_threshold(m) < w {
                return None;
            }
            let mf = m as f64;
            if shifted {
                p(vec![(mf, 1.0 / mf + (mf - 1.0) * w / mf)], vec![(1.0, 1.0), (mf - 1.0, w)])
            } else {
                p(vec![(mf, 1.0 / mf)], vec![(1.0, 1.0)])
            }
        }
        Scenario::EightPieceFloor => p(vec![(8.0, (1.0 + 7.0 * w) / 8.0)], vec![(1.0, 1.0), (7.0, w)]),
        Scenario::TwoPieceFloor => Some(Placement {
            cost: vec![(2.0, (1.0 + w) / 2.0)],
            reference: vec![(1.0, 1.0), (1.0, w)],
            margin_factor: 1.5,
        }),
    }
}

/// Total cost of the scenario's non-integer placement; `None` when inactive.
pub fn scenario_cost(
    params: &CostParams,
    sq: &ScenarioQuantities,
    scenario: Scenario,
    shifted: bool,
) -> Result<Option<f64>, CostError> {
    placement(sq, scenario, shifted).map(|p| params.weighted(&p.cost)).transpose()
}

/// `cost − reference` for the scenario; `None` when inactive.
pub fn scenario_gap(
    params: &CostParams,
    sq: &ScenarioQuantities,
    scenario: Scenario,
    shifted: bool,
) -> Result<Option<f64>, CostError> {
    let Some(p) = placement(sq, scenario, shifted) else { return Ok(None) };
    Ok(Some(params.weighted(&p.cost)? - params.weighted(&p.reference)?))
}

/// One inequality of the legacy search, `lower ≤ upper` (strict when
/// `strict`). Empty bins are charged `f(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Requirement {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub strict: bool,
}

impl Requirement {
    pub fn holds(&self) -> bool {
        if self.strict {
            self.lower < self.upper
        } else {
            self.lower <= self.upper
        }
    }
}

/// The twelve unit-item breakups plus the empty-bin condition
/// `k f(1) + (N−k) f(0) < 2k f(1/2) + (N−2k) f(0)`.
///
/// Splits into `m ∈ {10, 20, 1000}` pieces are only required when `N ≥ m`;
/// the empty-bin condition only when `N ≥ 2k`.
pub fn legacy_requirements(params: &CostParams, n: usize, k: usize) -> Result<Vec<Requirement>, CostError> {
    let f = |x: f64| params.eval(x);
    let (f0, f1) = (f(0.0)?, f(1.0)?);
    let mut out = Vec::new();
    for (m, piece) in [(20u32, 0.05), (10, 0.1), (5, 0.2), (4, 0.25), (3, 0.3333), (1000, 0.001)] {
        if n < m as usize {
            continue;
        }
        out.push(Requirement {
            name: format!("W{m}"),
            lower: f1 + (m - 1) as f64 * f0,
            upper: m as f64 * f(piece)?,
            strict: false,
        });
    }
    for a in [0.5, 0.001, 0.02, 0.05, 0.15, 0.3] {
        out.push(Requirement {
            name: format!("V{a}"),
            lower: f0 + f1,
            upper: f(a)? + f(1.0 - a)?,
            strict: false,
        });
    }
    if n >= 2 * k {
        let (nf, kf) = (n as f64, k as f64);
        out.push(Requirement {
            name: "emptyBins".into(),
            lower: kf * f1 + (nf - kf) * f0,
            upper: 2.0 * kf * f(0.5)? + (nf - 2.0 * kf) * f0,
            strict: true,
        });
    }
    Ok(out)
}
