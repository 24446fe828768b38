//! Exact two-phase simplex for small linear programs over free variables.
//!
//! Used for feasibility tests, recession-cone checks and one-dimensional
//! thresholds. Bland's rule guarantees termination.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// One constraint `coeffs . x >= rhs`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self { coeffs, rhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal {
        value: Rational,
        point: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost . y` over the current basic feasible solution.
    /// Returns `false` if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> bool {
        loop {
            let entering = (0..self.cols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        reduced -= &cost[b] * &self.rows[i][j];
                    }
                }
                reduced.is_positive()
            });
            let Some(j) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rows[i][self.cols] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }
}

/// Maximizes `objective . x` subject to `constraints`, with `x` free.
pub fn maximize(objective: &[Rational], constraints: &[Constraint]) -> LpOutcome {
    let n = objective.len();
    let m = constraints.len();
    // Columns: x+ (n), x- (n), slack (m), artificial (m), rhs.
    let art0 = 2 * n + m;
    let cols = art0 + m;
    let mut rows = Vec::with_capacity(m);
    for (i, c) in constraints.iter().enumerate() {
        debug_assert_eq!(c.coeffs.len(), n);
        // coeffs . x - s = rhs, s >= 0; flip so that rhs >= 0.
        let flip = c.rhs.is_negative();
        let sgn = if flip {
            -Rational::one()
        } else {
            Rational::one()
        };
        let mut row = vec![Rational::zero(); cols + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = a * &sgn;
            row[n + j] = -(a * &sgn);
        }
        row[2 * n + i] = -sgn.clone();
        row[art0 + i] = Rational::one();
        row[cols] = &c.rhs * &sgn;
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (art0..art0 + m).collect(),
        cols,
    };
    // Rows whose slack already has coefficient +1 can start with the slack basic.
    for i in 0..m {
        if t.rows[i][2 * n + i].is_one() {
            t.basis[i] = 2 * n + i;
            t.rows[i][art0 + i] = Rational::zero();
        }
    }
    let mut phase1 = vec![Rational::zero(); cols];
    for (i, b) in t.basis.clone().into_iter().enumerate() {
        if b >= art0 {
            phase1[art0 + i] = -Rational::one();
        }
    }
    let all = vec![true; cols];
    t.optimize(&phase1, &all);
    let infeasibility: Rational = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= art0)
        .map(|(i, _)| t.rows[i][cols].clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining (zero-level) artificials out of the basis.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= art0 {
            match (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let mut cost = vec![Rational::zero(); cols];
    for j in 0..n {
        cost[j] = objective[j].clone();
        cost[n + j] = -objective[j].clone();
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < art0).collect();
    if !t.optimize(&cost, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![Rational::zero(); cols];
    for (i, &b) in t.basis.iter().enumerate() {
        y[b] = t.rows[i][cols].clone();
    }
    let point: Vec<Rational> = (0..n).map(|j| &y[j] - &y[n + j]).collect();
    let value = objective.iter().zip(&point).map(|(c, x)| c * x).sum();
    LpOutcome::Optimal { value, point }
}

/// Any point satisfying all constraints, or `None` if infeasible.
pub fn feasible_point(nvars: usize, constraints: &[Constraint]) -> Option<Vec<Rational>> {
    match maximize(&vec![Rational::zero(); nvars], constraints) {
        LpOutcome::Optimal { point, .. } => Some(point),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn c(coeffs: &[i64], rhs: i64) -> Constraint {
        Constraint::new(coeffs.iter().map(|&x| int(x)).collect(), int(rhs))
    }

    #[test]
    fn optimum_on_triangle() {
        // x >= -1, y >= -1, -x-y >= -1; maximize x.
        let cons = [c(&[1, 0], -1), c(&[0, 1], -1), c(&[-1, -1], -1)];
        let out = maximize(&[int(1), int(0)], &cons);
        assert_eq!(out.value(), Some(&int(2)));
        let out = maximize(&[int(1), int(2)], &cons);
        assert_eq!(out.value(), Some(&int(3)));
    }

    #[test]
    fn detects_unbounded_and_infeasible() {
        assert_eq!(maximize(&[int(1)], &[c(&[1], 0)]), LpOutcome::Unbounded);
        assert_eq!(
            maximize(&[int(0)], &[c(&[1], 1), c(&[-1], 0)]),
            LpOutcome::Infeasible
        );
    }

    #[test]
    fn rational_optimum() {
        // 2x + 3y <= 1, x,y >= 0; maximize x + y -> 1/2.
        let cons = [c(&[-2, -3], -1), c(&[1, 0], 0), c(&[0, 1], 0)];
        assert_eq!(
            maximize(&[int(1), int(1)], &cons).value(),
            Some(&ratio(1, 2))
        );
    }

    #[test]
    fn degenerate_equalities() {
        // x + y = 1 via two inequalities plus x = y.
        let cons = [
            c(&[1, 1], 1),
            c(&[-1, -1], -1),
            c(&[1, -1], 0),
            c(&[-1, 1], 0),
        ];
        let p = feasible_point(2, &cons).unwrap();
        assert_eq!(p, vec![ratio(1, 2), ratio(1, 2)]);
    }
}
