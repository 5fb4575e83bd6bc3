use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use stableset::lpcore::{check_values, solve_lp, LinearProgram, LpStatus, Relation, Sense, SolverOptions, VarId};

#[derive(Debug, Clone)]
struct Instance {
    lo: Vec<f64>,
    hi: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
    c: Vec<f64>,
    sense: Sense,
}

impl Instance {
    fn build(&self) -> LinearProgram {
        let mut lp = LinearProgram::new();
        let xs: Vec<VarId> = (0..self.lo.len()).map(|j| lp.add_var(format!("x{j}"), self.lo[j], self.hi[j])).collect();
        for (i, (a, rel, b)) in self.rows.iter().enumerate() {
            let coeffs: Vec<(VarId, f64)> = xs.iter().zip(a).map(|(&v, &c)| (v, c)).collect();
            lp.add_constraint(format!("r{i}"), &coeffs, *rel, *b).unwrap();
        }
        let obj: Vec<(VarId, f64)> = xs.iter().zip(&self.c).map(|(&v, &c)| (v, c)).collect();
        lp.set_objective(self.sense, &obj);
        lp
    }

    fn feasible(&self, x: &[f64]) -> bool {
        let tol = 1e-7;
        x.iter().enumerate().all(|(j, &v)| v >= self.lo[j] - tol && v <= self.hi[j] + tol)
            && self.rows.iter().all(|(a, rel, b)| {
                let s: f64 = a.iter().zip(x).map(|(p, q)| p * q).sum();
                match rel {
                    Relation::Le => s <= b + tol,
                    Relation::Ge => s >= b - tol,
                    Relation::Eq => (s - b).abs() <= tol,
                }
            })
    }

    /// Best objective over every basic point: each choice of `n` linearly
    /// independent hyperplanes among rows and bounds.
    fn oracle(&self) -> Option<f64> {
        let n = self.lo.len();
        let mut planes: Vec<(Vec<f64>, f64)> = self.rows.iter().map(|(a, _, b)| (a.clone(), *b)).collect();
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            planes.push((e.clone(), self.lo[j]));
            planes.push((e, self.hi[j]));
        }
        let mut best: Option<f64> = None;
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let a = DMatrix::from_fn(n, n, |r, c| planes[idx[r]].0[c]);
            let b = DVector::from_fn(n, |r, _| planes[idx[r]].1);
            if let Some(x) = a.lu().solve(&b) {
                let x: Vec<f64> = x.iter().copied().collect();
                if x.iter().all(|v| v.is_finite()) && self.feasible(&x) {
                    let z: f64 = self.c.iter().zip(&x).map(|(p, q)| p * q).sum();
                    best = Some(match (best, self.sense) {
                        (None, _) => z,
                        (Some(b), Sense::Minimize) => b.min(z),
                        (Some(b), Sense::Maximize) => b.max(z),
                    });
                }
            }
            // Next combination of n plane indices.
            let m = planes.len();
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < m - n + i {
                    break;
                }
            }
            idx[i] += 1;
            for t in i + 1..n {
                idx[t] = idx[t - 1] + 1;
            }
        }
    }
}

fn small() -> impl Strategy<Value = f64> {
    (-4i32..=4).prop_map(f64::from)
}

fn arb_instance(max_n: usize, max_m: usize) -> impl Strategy<Value = Instance> {
    (1..=max_n, 0..=max_m).prop_flat_map(|(n, m)| {
        let bounds = proptest::collection::vec((-3i32..=0, 1i32..=4), n);
        let rel = prop_oneof![4 => Just(Relation::Le), 3 => Just(Relation::Ge), 1 => Just(Relation::Eq)];
        let rows = proptest::collection::vec((proptest::collection::vec(small(), n), rel, -6i32..=6), m);
        let sense = prop_oneof![Just(Sense::Minimize), Just(Sense::Maximize)];
        (bounds, rows, proptest::collection::vec(small(), n), sense).prop_map(|(bounds, rows, c, sense)| Instance {
            lo: bounds.iter().map(|b| f64::from(b.0)).collect(),
            hi: bounds.iter().map(|b| f64::from(b.1)).collect(),
            rows: rows.into_iter().map(|(a, r, b)| (a, r, f64::from(b))).collect(),
            c,
            sense,
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn two_variable_vertex_enumeration(inst in arb_instance(2, 5)) {
        check(&inst)?;
    }

    #[test]
    fn four_variable_vertex_enumeration(inst in arb_instance(4, 5)) {
        check(&inst)?;
    }

    #[test]
    fn unscaled_agrees(inst in arb_instance(3, 4)) {
        let lp = inst.build();
        let a = solve_lp(&lp, &SolverOptions::default()).unwrap();
        let b = solve_lp(&lp, &SolverOptions { scaling: false, ..SolverOptions::default() }).unwrap();
        prop_assert_eq!(a.status, b.status);
        if a.status == LpStatus::Optimal {
            prop_assert!((a.objective_value - b.objective_value).abs() <= 1e-6 * (1.0 + a.objective_value.abs()));
        }
    }
}

fn check(inst: &Instance) -> Result<(), TestCaseError> {
    let lp = inst.build();
    let sol = solve_lp(&lp, &SolverOptions::default()).unwrap();
    match inst.oracle() {
        None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
        Some(z) => {
            prop_assert_eq!(sol.status, LpStatus::Optimal);
            prop_assert!((sol.objective_value - z).abs() <= 1e-6 * (1.0 + z.abs()), "{} vs {}", sol.objective_value, z);
            prop_assert!(check_values(&lp, &sol.values, 1e-7).unwrap().is_empty());
        }
    }
    Ok(())
}
