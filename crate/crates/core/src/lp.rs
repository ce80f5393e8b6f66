//! Exact linear feasibility by phase-1 simplex with Bland's rule.

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    fn holds(&self, x: &[Rational]) -> bool {
        let lhs: Rational = self.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// Finds `x >= 0` (of length `num_vars`) satisfying every constraint, or
/// `None` if the system is infeasible.
pub fn find_feasible(num_vars: usize, constraints: &[Constraint]) -> Option<Vec<Rational>> {
    let m = constraints.len();
    // Columns: structural, then one slack/surplus per inequality, then artificials.
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut rhs: Vec<Rational> = Vec::with_capacity(m);
    let mut relations = Vec::with_capacity(m);
    for c in constraints {
        assert_eq!(c.coeffs.len(), num_vars, "constraint width mismatch");
        if c.rhs.is_negative() {
            rows.push(c.coeffs.iter().map(|a| -a).collect());
            rhs.push(-&c.rhs);
            relations.push(match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            });
        } else {
            rows.push(c.coeffs.clone());
            rhs.push(c.rhs.clone());
            relations.push(c.relation);
        }
    }
    let num_slack = relations.iter().filter(|r| **r != Relation::Eq).count();
    let num_art = relations.iter().filter(|r| **r != Relation::Le).count();
    let width = num_vars + num_slack + num_art;
    let art_start = num_vars + num_slack;

    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (num_vars, art_start);
    for (k, row) in rows.into_iter().enumerate() {
        let mut full = row;
        full.resize(width, Rational::zero());
        match relations[k] {
            Relation::Le => {
                full[next_slack] = Rational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                full[next_slack] = Rational::from(-1);
                next_slack += 1;
                full[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                full[next_art] = Rational::one();
                basis.push(next_art);
                next_art += 1;
            }
        }
        full.push(rhs[k].clone());
        tableau.push(full);
    }

    // Reduced costs of the phase-1 objective (sum of artificials).
    let mut cost = vec![Rational::zero(); width + 1];
    for (row, &b) in tableau.iter().zip(&basis) {
        if b >= art_start {
            for (c, a) in cost.iter_mut().zip(row) {
                *c = &*c - a;
            }
        }
    }
    for c in cost.iter_mut().take(width).skip(art_start) {
        *c = &*c + &Rational::one();
    }

    loop {
        let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (r, row) in tableau.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase-1 objective is bounded below");
        pivot(&mut tableau, &mut cost, r, enter);
        basis[r] = enter;
    }

    if !cost[width].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); num_vars];
    for (row, &b) in tableau.iter().zip(&basis) {
        if b < num_vars {
            x[b] = row[width].clone();
        }
    }
    debug_assert!(constraints.iter().all(|c| c.holds(&x)));
    Some(x)
}

fn pivot(tableau: &mut [Vec<Rational>], cost: &mut [Rational], r: usize, col: usize) {
    let p = tableau[r][col].clone();
    for v in tableau[r].iter_mut() {
        *v = &*v / &p;
    }
    let pivot_row = tableau[r].clone();
    for (k, row) in tableau.iter_mut().enumerate() {
        if k != r && !row[col].is_zero() {
            let factor = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &(&factor * pv);
                }
            }
        }
    }
    if !cost[col].is_zero() {
        let factor = cost[col].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v = &*v - &(&factor * pv);
            }
        }
    }
}
