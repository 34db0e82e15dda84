//! Dense two-phase tableau simplex over exact rationals, smallest-index pivoting.

use num_traits::{Signed, Zero};

use super::LpError;
use crate::exactnum::Rational;
use crate::model::Sense;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub label: String,
    pub coeffs: Vec<Rational>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// All variables are nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub objective: Objective,
    pub costs: Vec<Rational>,
    pub var_names: Vec<String>,
    pub rows: Vec<Row>,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn value(&self, x: &[Rational]) -> Rational {
        self.costs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Each row evaluated at `x`.
    pub fn check(&self, x: &[Rational]) -> Vec<crate::model::ConstraintCheck> {
        self.rows
            .iter()
            .map(|r| crate::model::ConstraintCheck {
                label: r.label.clone(),
                lhs: r.coeffs.iter().zip(x).map(|(a, v)| a * v).sum(),
                sense: r.sense,
                rhs: r.rhs.clone(),
            })
            .collect()
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.var_names.len() != n {
            return Err(LpError::Shape(format!("{} names for {n} variables", self.var_names.len())));
        }
        if let Some(r) = self.rows.iter().find(|r| r.coeffs.len() != n) {
            return Err(LpError::Shape(format!("row {} has {} coefficients, expected {n}", r.label, r.coeffs.len())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub optimum: Rational,
    pub x: Vec<Rational>,
    pub pivots: usize,
}

struct Tableau {
    /// `m` constraint rows then the objective row; last column is the right-hand side.
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn m(&self) -> usize {
        self.basis.len()
    }

    fn rhs_col(&self) -> usize {
        self.t[0].len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v /= &p;
        }
        let pr = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, q) in row.iter_mut().zip(&pr) {
                if !q.is_zero() {
                    *v -= &f * q;
                }
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Minimizes the objective row over the columns in `allowed`. `Err` means unbounded.
    fn run(&mut self, allowed: &[bool]) -> Result<(), ()> {
        let obj = self.m();
        let rhs = self.rhs_col();
        loop {
            let Some(c) = (0..rhs).find(|&c| allowed[c] && self.t[obj][c].is_negative()) else {
                return Ok(());
            };
            let mut best: Option<(Rational, usize, usize)> = None;
            for r in 0..self.m() {
                if self.t[r][c].is_positive() {
                    let ratio = &self.t[r][rhs] / &self.t[r][c];
                    let better = match &best {
                        None => true,
                        Some((br, _, bv)) => ratio < *br || (ratio == *br && self.basis[r] < *bv),
                    };
                    if better {
                        best = Some((ratio, r, self.basis[r]));
                    }
                }
            }
            let Some((_, r, _)) = best else { return Err(()) };
            self.pivot(r, c);
        }
    }

    fn set_objective(&mut self, costs: &[Rational]) {
        let obj = self.m();
        let row = &mut self.t[obj];
        for v in row.iter_mut() {
            v.set_zero();
        }
        row[..costs.len()].clone_from_slice(costs);
        for r in 0..self.m() {
            let c = self.basis[r];
            if self.t[obj][c].is_zero() {
                continue;
            }
            let f = self.t[obj][c].clone();
            let pr = self.t[r].clone();
            for (v, q) in self.t[obj].iter_mut().zip(&pr) {
                *v -= &f * q;
            }
        }
    }
}

/// Exact optimum of `lp`, or `Infeasible` / `Unbounded`.
pub fn solve_exact(lp: &LpProblem) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.num_rows();
    let zero = Rational::zero();
    let one = Rational::from_integer(1.into());

    // normalize to nonnegative right-hand sides
    let rows: Vec<(Vec<Rational>, Sense, Rational)> = lp
        .rows
        .iter()
        .map(|r| {
            if r.rhs.is_negative() {
                let sense = match r.sense {
                    Sense::AtLeast => Sense::AtMost,
                    Sense::AtMost => Sense::AtLeast,
                    Sense::Equal => Sense::Equal,
                };
                (r.coeffs.iter().map(|v| -v).collect(), sense, -&r.rhs)
            } else {
                (r.coeffs.clone(), r.sense, r.rhs.clone())
            }
        })
        .collect();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Equal).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::AtMost).count();
    let width = n + n_slack + n_art + 1;
    let mut t = vec![vec![zero.clone(); width]; m + 1];
    let mut basis = vec![0; m];
    let (mut s, mut a) = (n, n + n_slack);
    for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        t[i][..n].clone_from_slice(coeffs);
        t[i][width - 1] = rhs.clone();
        match sense {
            Sense::AtMost => {
                t[i][s] = one.clone();
                basis[i] = s;
                s += 1;
            }
            Sense::AtLeast => {
                t[i][s] = -one.clone();
                s += 1;
                t[i][a] = one.clone();
                basis[i] = a;
                a += 1;
            }
            Sense::Equal => {
                t[i][a] = one.clone();
                basis[i] = a;
                a += 1;
            }
        }
    }
    let mut tab = Tableau { t, basis, pivots: 0 };
    let art_start = n + n_slack;

    let mut phase1 = vec![zero.clone(); width - 1];
    for v in phase1.iter_mut().skip(art_start) {
        *v = one.clone();
    }
    tab.set_objective(&phase1);
    tab.run(&vec![true; width - 1]).expect("phase one is bounded below by zero");
    if !tab.t[m][width - 1].is_zero() {
        return Err(LpError::Infeasible);
    }
    // drive remaining artificials out of the basis; rows with no other support are redundant
    let mut r = 0;
    while r < tab.m() {
        if tab.basis[r] >= art_start {
            if let Some(c) = (0..art_start).find(|&c| !tab.t[r][c].is_zero()) {
                tab.pivot(r, c);
            } else {
                tab.t.remove(r);
                tab.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    let mut costs = vec![zero.clone(); width - 1];
    for (c, v) in costs.iter_mut().zip(&lp.costs) {
        *c = match lp.objective {
            Objective::Minimize => v.clone(),
            Objective::Maximize => -v,
        };
    }
    tab.set_objective(&costs);
    let allowed: Vec<bool> = (0..width - 1).map(|c| c < art_start).collect();
    tab.run(&allowed).map_err(|_| LpError::Unbounded)?;

    let mut x = vec![zero; n];
    let rhs = tab.rhs_col();
    for (r, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.t[r][rhs].clone();
        }
    }
    let optimum = lp.value(&x);
    Ok(LpSolution { optimum, x, pivots: tab.pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn row(coeffs: &[i64], sense: Sense, rhs: Rational) -> Row {
        Row { label: String::new(), coeffs: coeffs.iter().map(|&v| int(v)).collect(), sense, rhs }
    }

    fn lp(objective: Objective, costs: &[i64], rows: Vec<Row>) -> LpProblem {
        LpProblem {
            objective,
            costs: costs.iter().map(|&v| int(v)).collect(),
            var_names: (0..costs.len()).map(|i| format!("x{i}")).collect(),
            rows,
        }
    }

    #[test]
    fn single_variable_lower_bound() {
        let p = lp(Objective::Minimize, &[1], vec![row(&[1], Sense::AtLeast, rat(3, 2))]);
        assert_eq!(solve_exact(&p).unwrap().optimum, rat(3, 2));
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let p = lp(
            Objective::Maximize,
            &[3, 5],
            vec![row(&[1, 0], Sense::AtMost, int(4)), row(&[0, 2], Sense::AtMost, int(12)), row(&[3, 2], Sense::AtMost, int(18))],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.optimum, int(36));
        assert_eq!(s.x, vec![int(2), int(6)]);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + y, x − y = −1, x + y ≥ 3 → 3 at (1, 2)
        let p = lp(
            Objective::Minimize,
            &[1, 1],
            vec![row(&[1, -1], Sense::Equal, int(-1)), row(&[1, 1], Sense::AtLeast, int(3))],
        );
        let s = solve_exact(&p).unwrap();
        assert_eq!(s.optimum, int(3));
        assert!(p.check(&s.x).iter().all(|c| c.holds()));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(Objective::Minimize, &[1], vec![row(&[1], Sense::AtMost, int(1)), row(&[1], Sense::AtLeast, int(2))]);
        assert!(matches!(solve_exact(&p), Err(LpError::Infeasible)));
        let p = lp(Objective::Maximize, &[1], vec![row(&[1], Sense::AtLeast, int(1))]);
        assert!(matches!(solve_exact(&p), Err(LpError::Unbounded)));
    }

    #[test]
    fn redundant_equalities() {
        let p = lp(
            Objective::Minimize,
            &[1, 2],
            vec![row(&[1, 1], Sense::Equal, int(2)), row(&[2, 2], Sense::Equal, int(4))],
        );
        assert_eq!(solve_exact(&p).unwrap().optimum, int(2));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule
        let q = |v: i64, d: i64| rat(v, d);
        let p = LpProblem {
            objective: Objective::Minimize,
            costs: vec![q(-3, 4), int(150), q(-1, 50), int(6)],
            var_names: (0..4).map(|i| format!("x{i}")).collect(),
            rows: vec![
                Row { label: "a".into(), coeffs: vec![q(1, 4), int(-60), q(-1, 25), int(9)], sense: Sense::AtMost, rhs: int(0) },
                Row { label: "b".into(), coeffs: vec![q(1, 2), int(-90), q(-1, 50), int(3)], sense: Sense::AtMost, rhs: int(0) },
                Row { label: "c".into(), coeffs: vec![int(0), int(0), int(1), int(0)], sense: Sense::AtMost, rhs: int(1) },
            ],
        };
        assert_eq!(solve_exact(&p).unwrap().optimum, q(-1, 20));
    }
}
