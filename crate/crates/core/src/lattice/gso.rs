use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{dot_rat, norm_sq_rat, rat, to_rat_vec, IntMat, RatVec, Rational};

/// Gram-Schmidt orthogonalization of the columns of a basis.
///
/// `mu[i][j]` (for `j < i`) is `<b_i, b*_j> / |b*_j|^2`, so that
/// `b_i = b*_i + sum_{j<i} mu[i][j] b*_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gso {
    pub ortho: Vec<RatVec>,
    pub mu: Vec<Vec<Rational>>,
    pub norms_sq: Vec<Rational>,
}

pub fn gram_schmidt(b: &IntMat) -> Result<Gso> {
    let cols: Vec<RatVec> = b.col_vecs().iter().map(|c| to_rat_vec(c)).collect();
    let mut ortho: Vec<RatVec> = Vec::with_capacity(cols.len());
    let mut mu = Vec::with_capacity(cols.len());
    let mut norms_sq: Vec<Rational> = Vec::with_capacity(cols.len());
    for (i, bi) in cols.iter().enumerate() {
        let mut star = bi.clone();
        let mut row = Vec::with_capacity(i);
        for j in 0..i {
            let m = dot_rat(bi, &ortho[j]) / &norms_sq[j];
            for (s, o) in star.iter_mut().zip(&ortho[j]) {
                *s -= &m * o;
            }
            row.push(m);
        }
        let ns = norm_sq_rat(&star);
        if ns.is_zero() {
            return Err(Error::DependentColumns { index: i });
        }
        ortho.push(star);
        mu.push(row);
        norms_sq.push(ns);
    }
    Ok(Gso { ortho, mu, norms_sq })
}

/// First failed condition of an LLL-reducedness test (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LllViolation {
    /// `|mu[i][j]| > 1/2`
    Size { i: usize, j: usize, mu: Rational },
    /// `|b*_i|^2 > 2 |b*_{i+1}|^2`
    Exchange { i: usize, lhs: Rational, rhs: Rational },
}

impl fmt::Display for LllViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LllViolation::Size { i, j, mu } => write!(f, "|mu[{i}][{j}]| = |{mu}| > 1/2"),
            LllViolation::Exchange { i, lhs, rhs } => {
                write!(f, "|b*_{i}|^2 = {lhs} > 2 |b*_{}|^2 = {rhs}", i + 1)
            }
        }
    }
}

/// Checks the size condition `|mu_ij| <= 1/2` and the exchange condition
/// `|b*_i|^2 <= 2 |b*_{i+1}|^2`, returning the first violation in column order.
pub fn check_lll(b: &IntMat) -> Result<Option<LllViolation>> {
    let g = gram_schmidt(b)?;
    let half = rat(1, 2);
    let two = rat(2, 1);
    for i in 0..g.norms_sq.len() {
        for j in 0..i {
            if g.mu[i][j].abs() > half {
                return Ok(Some(LllViolation::Size { i, j, mu: g.mu[i][j].clone() }));
            }
        }
        if i > 0 {
            let rhs = &two * &g.norms_sq[i];
            if g.norms_sq[i - 1] > rhs {
                return Ok(Some(LllViolation::Exchange { i: i - 1, lhs: g.norms_sq[i - 1].clone(), rhs }));
            }
        }
    }
    Ok(None)
}

pub fn is_lll_reduced(b: &IntMat) -> Result<bool> {
    Ok(check_lll(b)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{det_int, Matrix};
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn identity_is_orthogonal() {
        let g = gram_schmidt(&Matrix::identity(3)).unwrap();
        assert!(g.mu.iter().flatten().all(Zero::is_zero));
        assert!(g.norms_sq.iter().all(One::is_one));
        assert_eq!(check_lll(&Matrix::identity(3)).unwrap(), None);
    }

    #[test]
    fn two_by_two_by_hand() {
        // columns (1,0), (1,1)
        let b = Matrix::from_i64(&[&[1, 1], &[0, 1]]);
        let g = gram_schmidt(&b).unwrap();
        assert_eq!(g.ortho[0], vec![rat(1, 1), rat(0, 1)]);
        assert_eq!(g.mu[1][0], rat(1, 1));
        assert_eq!(g.ortho[1], vec![rat(0, 1), rat(1, 1)]);
    }

    #[test]
    fn size_violation_reported() {
        // columns (1,0), (4,1)
        let b = Matrix::from_i64(&[&[1, 4], &[0, 1]]);
        assert_eq!(check_lll(&b).unwrap(), Some(LllViolation::Size { i: 1, j: 0, mu: rat(4, 1) }));
    }

    #[test]
    fn exchange_violation_reported() {
        // columns (3,0), (0,1): 9 > 2
        let b = Matrix::from_i64(&[&[3, 0], &[0, 1]]);
        assert!(matches!(check_lll(&b).unwrap(), Some(LllViolation::Exchange { i: 0, .. })));
    }

    #[test]
    fn dependent_columns_named() {
        let b = Matrix::from_i64(&[&[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(gram_schmidt(&b), Err(Error::DependentColumns { index: 2 }));
    }

    proptest! {
        #[test]
        fn gso_invariants(entries in prop::collection::vec(-9i64..=9, 16)) {
            let b = Matrix::from_fn(4, 4, |i, j| crate::exact::int(entries[i * 4 + j]));
            let det = det_int(&b).unwrap();
            prop_assume!(!det.is_zero());
            let g = gram_schmidt(&b).unwrap();
            let prod = g.norms_sq.iter().fold(Rational::one(), |acc, x| acc * x);
            prop_assert_eq!(prod, Rational::from_integer(det_int(&b.transpose().mul(&b).unwrap()).unwrap()));
            for i in 0..4 {
                for j in 0..i {
                    prop_assert!(dot_rat(&g.ortho[i], &g.ortho[j]).is_zero());
                }
                let mut rebuilt = g.ortho[i].clone();
                for j in 0..i {
                    for (r, o) in rebuilt.iter_mut().zip(&g.ortho[j]) {
                        *r += &g.mu[i][j] * o;
                    }
                }
                prop_assert_eq!(rebuilt, to_rat_vec(&b.col(i)));
            }
        }
    }
}
