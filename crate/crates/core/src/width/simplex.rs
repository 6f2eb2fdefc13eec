//! Dense two-phase simplex over the rationals with Bland's rule.
//!
//! Free variables are split as `x = x+ - x-`, every finite bound becomes a
//! `<=` row with a slack, and rows with a negative right-hand side get an
//! artificial variable for phase one.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{RatVec, Rational};

use super::Polytope;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Max,
    Min,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, vertex: RatVec },
    Infeasible,
    Unbounded,
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
    // rows of coefficients with the right-hand side in the last slot
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for x in self.t[r].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().enumerate().map(|(i, &b)| &cost[b] * &self.t[i][self.cols]).sum()
    }

    /// Maximizes `cost . z` over columns `< allowed`; `false` when unbounded.
    fn run(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                        rc -= &cost[b] * &self.t[i][j];
                    }
                }
                if rc.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[i][self.cols] / a;
                let better = match &leaving {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, _)) = leaving else { return false };
            self.pivot(r, j);
        }
    }
}

/// Exact optimum of `c x` over the polytope.
pub fn lp_optimize(c: &[Rational], poly: &Polytope, sense: Sense) -> Result<LpOutcome> {
    let n = poly.dim();
    if c.len() != n {
        return Err(Error::Dimension(format!("objective has length {}, polytope dimension {n}", c.len())));
    }
    // `coeffs . x <= rhs`
    let mut rows: Vec<(RatVec, Rational)> = Vec::new();
    for i in 0..poly.rows() {
        let row = poly.matrix.row(i);
        if let Some(u) = &poly.upper[i] {
            rows.push((row.to_vec(), u.clone()));
        }
        if let Some(l) = &poly.lower[i] {
            rows.push((row.iter().map(|x| -x).collect(), -l));
        }
    }
    let m = rows.len();
    let n_art = rows.iter().filter(|(_, b)| b.is_negative()).count();
    let first_art = 2 * n + m;
    let cols = first_art + n_art;
    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = first_art;
    for (i, (coeffs, rhs)) in rows.into_iter().enumerate() {
        let mut row = vec![Rational::zero(); cols + 1];
        let flip = rhs.is_negative();
        for (j, x) in coeffs.into_iter().enumerate() {
            let x = if flip { -x } else { x };
            row[n + j] = -x.clone();
            row[j] = x;
        }
        row[2 * n + i] = if flip { -Rational::one() } else { Rational::one() };
        row[cols] = if flip { -rhs } else { rhs };
        if flip {
            row[art] = Rational::one();
            basis.push(art);
            art += 1;
        } else {
            basis.push(2 * n + i);
        }
        t.push(row);
    }
    let mut tab = Tableau { t, basis, cols };

    if n_art > 0 {
        let mut cost = vec![Rational::zero(); cols];
        for x in &mut cost[first_art..] {
            *x = -Rational::one();
        }
        tab.run(&cost, cols);
        if tab.objective(&cost).is_negative() {
            return Ok(LpOutcome::Infeasible);
        }
        let mut r = 0;
        while r < tab.t.len() {
            if tab.basis[r] >= first_art {
                match (0..first_art).find(|&j| !tab.t[r][j].is_zero()) {
                    Some(j) => tab.pivot(r, j),
                    None => {
                        tab.t.remove(r);
                        tab.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    let mut cost = vec![Rational::zero(); cols];
    for (j, cj) in c.iter().enumerate() {
        let cj = if sense == Sense::Max { cj.clone() } else { -cj };
        cost[n + j] = -cj.clone();
        cost[j] = cj;
    }
    if !tab.run(&cost, first_art) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut value = tab.objective(&cost);
    if sense == Sense::Min {
        value = -value;
    }
    let mut z = vec![Rational::zero(); cols];
    for (i, &b) in tab.basis.iter().enumerate() {
        z[b] = tab.t[i][cols].clone();
    }
    let vertex = (0..n).map(|j| &z[j] - &z[n + j]).collect();
    Ok(LpOutcome::Optimal { value, vertex })
}
