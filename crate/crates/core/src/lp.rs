//! Exact rational linear programming: dense two-phase simplex with Bland's
//! anti-cycling rule. Problems here are small (hundreds of variables), so a
//! dense tableau over `BigRational` is adequate and keeps results exact.

use crate::rational::Rational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize c.x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn solution(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, objective: vec![Rational::zero(); num_vars], constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Sparse helper: `(index, coefficient)` pairs.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars];
        for (i, c) in terms {
            coeffs[*i] += c;
        }
        self.add(coeffs, relation, rhs);
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run()
    }

    /// Feasibility only (objective ignored).
    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        let mut p = self.clone();
        p.objective = vec![Rational::zero(); self.num_vars];
        match p.solve() {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

struct Tableau {
    // rows: constraint rows, each of width `cols + 1` (last entry = rhs)
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
    num_orig: usize,
    artificial_start: usize,
    objective: Vec<Rational>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let n = lp.num_vars;
        let slack_count = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let artificial_start = n + slack_count;
        let cols = artificial_start + m;
        let mut rows = Vec::with_capacity(m);
        let mut slack = n;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![Rational::zero(); cols + 1];
            for (j, v) in c.coeffs.iter().enumerate() {
                row[j] = v.clone();
            }
            match c.relation {
                Relation::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            row[cols] = c.rhs.clone();
            if row[cols].is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
            row[artificial_start + i] = Rational::one();
            rows.push(row);
        }
        let basis = (artificial_start..artificial_start + m).collect();
        let mut objective = vec![Rational::zero(); cols];
        objective[..n].clone_from_slice(&lp.objective);
        Self { rows, basis, cols, num_orig: n, artificial_start, objective }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over the current basis, restricted to columns in
    /// `allowed`. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            // reduced cost of column j: cost_j - sum_i cost_{basis_i} * row_i[j]
            let entering = (0..self.cols).filter(|&j| allowed(j) && !self.basis.contains(&j)).find(|&j| {
                let mut rc = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    if !row[j].is_zero() {
                        rc -= &cost[self.basis[i]] * &row[j];
                    }
                }
                rc.is_positive()
            });
            let Some(c) = entering else { return true };
            // ratio test; Bland: least basis index among ties
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.cols] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn run(mut self) -> LpOutcome {
        let art = self.artificial_start;
        let mut phase1 = vec![Rational::zero(); self.cols];
        for v in phase1.iter_mut().skip(art) {
            *v = -Rational::one();
        }
        self.optimize(&phase1, |_| true);
        let infeas: Rational = self
            .basis
            .iter()
            .zip(&self.rows)
            .filter(|(b, _)| **b >= art)
            .map(|(_, row)| row[self.cols].clone())
            .sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive remaining (zero-valued) artificials out of the basis
        for r in 0..self.rows.len() {
            if self.basis[r] >= art {
                if let Some(c) = (0..art).find(|&c| !self.rows[r][c].is_zero()) {
                    self.pivot(r, c);
                }
            }
        }
        let cost = self.objective.clone();
        let bounded = self.optimize(&cost, |j| j < art);
        if !bounded {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); self.num_orig];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.num_orig {
                x[b] = self.rows[r][self.cols].clone();
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    #[test]
    fn small_max() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![int(3), int(2)];
        lp.add(vec![int(1), int(1)], Relation::Le, int(4));
        lp.add(vec![int(1), int(3)], Relation::Le, int(6));
        lp.add(vec![int(1), int(0)], Relation::Le, int(3));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, int(11));
                assert_eq!(x, vec![int(3), int(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![int(1)], Relation::Ge, int(2));
        lp.add(vec![int(1)], Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![int(1)];
        lp.add(vec![int(1)], Relation::Ge, int(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn equality_with_fractions() {
        let mut lp = LinearProgram::new(2);
        lp.add(vec![int(2), int(1)], Relation::Eq, int(1));
        lp.add(vec![int(1), int(-1)], Relation::Eq, int(0));
        let x = lp.feasible_point().unwrap();
        assert_eq!(x, vec![q(1, 3), q(1, 3)]);
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling example; Bland's rule must terminate.
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![q(3, 4), int(-150), q(1, 50), int(-6)];
        lp.add(vec![q(1, 4), int(-60), q(-1, 25), int(9)], Relation::Le, int(0));
        lp.add(vec![q(1, 2), int(-90), q(-1, 50), int(3)], Relation::Le, int(0));
        lp.add(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
