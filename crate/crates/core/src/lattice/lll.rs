//! Integral LLL reduction with unimodular transform tracking.
//!
//! All Gram-Schmidt data is kept as integers: `d[i]` is the Gram determinant
//! of the first `i` columns and `lam[k][j] = d[j+1] * mu_kj`. A swap happens
//! when the exchange condition `|b*_{k-1}|^2 <= 2 |b*_k|^2` fails,
//! i.e. when `d[k]^2 > 2 d[k+1] d[k-1]`.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{dot_int, IntMat, IntVec, Matrix, RatMat};

/// Reduced basis `B U`, the transform `U` and its integral inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub reduced: IntMat,
    pub transform: IntMat,
    pub inverse: IntMat,
}

struct Reducer {
    b: Vec<IntVec>,
    u: Vec<IntVec>,
    uinv: Vec<IntVec>,
    d: Vec<BigInt>,
    lam: Vec<Vec<BigInt>>,
}

impl Reducer {
    fn size_reduce(&mut self, k: usize, l: usize) {
        let dl = &self.d[l + 1];
        let two_lam: BigInt = &self.lam[k][l] * 2;
        if two_lam.abs() <= *dl {
            return;
        }
        let q = (two_lam + dl).div_floor(&(dl * 2));
        let (bl, ul) = (self.b[l].clone(), self.u[l].clone());
        for (x, y) in self.b[k].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        for (x, y) in self.u[k].iter_mut().zip(&ul) {
            *x -= &q * y;
        }
        let row_k = self.uinv[k].clone();
        for (x, y) in self.uinv[l].iter_mut().zip(&row_k) {
            *x += &q * y;
        }
        let t = &q * &self.d[l + 1];
        self.lam[k][l] -= t;
        for i in 0..l {
            let t = &q * &self.lam[l][i];
            self.lam[k][i] -= t;
        }
    }

    fn swap(&mut self, k: usize, kmax: usize) {
        self.b.swap(k, k - 1);
        self.u.swap(k, k - 1);
        self.uinv.swap(k, k - 1);
        for j in 0..k - 1 {
            let t = std::mem::take(&mut self.lam[k][j]);
            self.lam[k][j] = std::mem::replace(&mut self.lam[k - 1][j], t);
        }
        let lam = self.lam[k][k - 1].clone();
        let big_b = (&self.d[k - 1] * &self.d[k + 1] + &lam * &lam) / &self.d[k];
        for i in k + 1..=kmax {
            let t = self.lam[i][k].clone();
            let new_k = (&self.d[k + 1] * &self.lam[i][k - 1] - &lam * &t) / &self.d[k];
            let new_km1 = (&big_b * &t + &lam * &new_k) / &self.d[k + 1];
            self.lam[i][k] = new_k;
            self.lam[i][k - 1] = new_km1;
        }
        self.d[k] = big_b;
    }

    fn extend_gso(&mut self, k: usize) -> Result<()> {
        for j in 0..=k {
            let mut u = dot_int(&self.b[k], &self.b[j]);
            for i in 0..j {
                u = (&self.d[i + 1] * u - &self.lam[k][i] * &self.lam[j][i]) / &self.d[i];
            }
            if j < k {
                self.lam[k][j] = u;
            } else {
                if u.is_zero() {
                    return Err(Error::DependentColumns { index: k });
                }
                self.d[k + 1] = u;
            }
        }
        Ok(())
    }
}

/// LLL-reduces the columns of `b`.
pub fn lll_reduce(b: &IntMat) -> Result<ReductionResult> {
    let n = b.cols();
    let m = b.rows();
    let ident = Matrix::<BigInt>::identity(n);
    let mut r = Reducer {
        b: b.col_vecs(),
        u: ident.col_vecs(),
        uinv: ident.row_vecs(),
        d: vec![BigInt::zero(); n + 1],
        lam: vec![vec![BigInt::zero(); n]; n],
    };
    r.d[0] = BigInt::one();
    if n > 0 {
        r.extend_gso(0)?;
    }
    let mut k = 1;
    let mut kmax = 0;
    while k < n {
        if k > kmax {
            kmax = k;
            r.extend_gso(k)?;
        }
        r.size_reduce(k, k - 1);
        let lhs = &r.d[k] * &r.d[k];
        let rhs = &r.d[k + 1] * &r.d[k - 1] * 2;
        if lhs > rhs {
            r.swap(k, kmax);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                r.size_reduce(k, l);
            }
            k += 1;
        }
    }
    Ok(ReductionResult {
        reduced: Matrix::from_cols(r.b, m)?,
        transform: Matrix::from_cols(r.u, n)?,
        inverse: Matrix::from_rows(r.uinv)?,
    })
}

/// Reduces a rational basis after clearing denominators; returns the result
/// for the scaled integral basis together with the scale factor.
pub fn lll_reduce_rational(b: &RatMat) -> Result<(ReductionResult, BigInt)> {
    let mut scale = BigInt::one();
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            scale = scale.lcm(b[(i, j)].denom());
        }
    }
    let s = num_rational::BigRational::from_integer(scale.clone());
    let scaled = b.map(|q| (q * &s).to_integer());
    Ok((lll_reduce(&scaled)?, scale))
}

/// Stacks `a` on top of the identity: the columns of `[a; I]`.
pub fn stacked(a: &[BigInt]) -> IntMat {
    let n = a.len();
    Matrix::from_fn(n + 1, n, |i, j| {
        if i == 0 {
            a[j].clone()
        } else if i - 1 == j {
            BigInt::one()
        } else {
            BigInt::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{det_int, int, int_vec};
    use crate::lattice::gso::is_lll_reduced;
    use proptest::prelude::*;

    fn check_result(b: &IntMat, r: &ReductionResult) {
        assert_eq!(b.mul(&r.transform).unwrap(), r.reduced);
        assert!(det_int(&r.transform).unwrap().abs().is_one());
        assert_eq!(r.transform.mul(&r.inverse).unwrap(), Matrix::identity(b.cols()));
        assert!(is_lll_reduced(&r.reduced).unwrap());
    }

    #[test]
    fn identity_is_fixed() {
        let r = lll_reduce(&Matrix::identity(3)).unwrap();
        assert_eq!(r.reduced, Matrix::identity(3));
        assert_eq!(r.transform, Matrix::identity(3));
    }

    #[test]
    fn single_size_reduction() {
        let b = Matrix::from_i64(&[&[1, 4], &[0, 1]]);
        let r = lll_reduce(&b).unwrap();
        assert_eq!(r.reduced, Matrix::identity(2));
        assert_eq!(r.transform, Matrix::from_i64(&[&[1, -4], &[0, 1]]));
        assert_eq!(r.inverse, Matrix::from_i64(&[&[1, 4], &[0, 1]]));
    }

    #[test]
    fn example_knapsack_stack() {
        let b = stacked(&int_vec(&[3488, 451, 1231, 6415, 2191]));
        let r = lll_reduce(&b).unwrap();
        check_result(&b, &r);
    }

    #[test]
    fn dependent_input_rejected() {
        let b = Matrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(matches!(lll_reduce(&b), Err(Error::DependentColumns { .. })));
    }

    #[test]
    fn rational_input_cleared() {
        let b = Matrix::from_i64(&[&[1, 4], &[0, 1]]).to_rational().map(|q| q / num_rational::BigRational::from_integer(int(3)));
        let (r, scale) = lll_reduce_rational(&b).unwrap();
        assert_eq!(scale, int(3));
        assert_eq!(r.reduced, Matrix::identity(2));
    }

    proptest! {
        #[test]
        fn reduction_postconditions(n in 1usize..=6, extra in 0usize..=2, entries in prop::collection::vec(-30i64..=30, 64)) {
            let m = n + extra;
            let b = Matrix::from_fn(m, n, |i, j| int(entries[(i * 8 + j) % 64]));
            match lll_reduce(&b) {
                Ok(r) => check_result(&b, &r),
                Err(Error::DependentColumns { .. }) => {
                    prop_assert!(crate::exact::matrix::rank(&b.to_rational()) < n);
                }
                Err(e) => prop_assert!(false, "unexpected {e}"),
            }
        }

        #[test]
        fn knapsack_stacks_reduce(a in prop::collection::vec(1i64..1_000_000_000, 2..=7)) {
            let b = stacked(&int_vec(&a));
            let r = lll_reduce(&b).unwrap();
            check_result(&b, &r);
        }
    }
}
