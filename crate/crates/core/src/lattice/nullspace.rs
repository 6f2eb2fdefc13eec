//! Nullspace lattices of a single row, coefficient vectors, and completeness
//! certificates for integral lattices.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    dot_rat, ext_gcd, gcd_vec, gram_det, round_half_away, to_rat_vec, IntMat, IntVec, Matrix, Rational,
};
use crate::lattice::gso::gram_schmidt;

/// Unimodular `W` with `a W = (g, 0, ..., 0)`, `g = gcd(a) >= 0`, built by a
/// chain of 2x2 extended-Euclid column operations.
pub fn unimodular_column_reduction(a: &[BigInt]) -> (IntMat, BigInt) {
    let n = a.len();
    let mut w = Matrix::<BigInt>::identity(n).col_vecs();
    let mut head = a.first().cloned().unwrap_or_else(BigInt::zero);
    for j in 1..n {
        let aj = &a[j];
        if aj.is_zero() {
            continue;
        }
        let (g, x, y) = ext_gcd(&head, aj);
        let (c1, cj) = (&head / &g, aj / &g);
        let (w1, wj) = (w[0].clone(), w[j].clone());
        w[0] = w1.iter().zip(&wj).map(|(p, q)| &x * p + &y * q).collect();
        w[j] = w1.iter().zip(&wj).map(|(p, q)| -&cj * p + &c1 * q).collect();
        head = g;
    }
    if head.is_negative() {
        head = -head;
        w[0].iter_mut().for_each(|x| *x = -x.clone());
    }
    (Matrix::from_cols(w, n).expect("square"), head)
}

/// Basis (as columns, `n x (n-1)`) of `{x integral : a x = 0}` for coprime `a`.
pub fn nullspace_basis(a: &[BigInt]) -> Result<IntMat> {
    let g = gcd_vec(a);
    if !g.is_one() {
        return Err(Error::NotCoprime { gcd: g.to_string() });
    }
    let (w, _) = unimodular_column_reduction(a);
    let idx: Vec<usize> = (1..a.len()).collect();
    Ok(w.select_cols(&idx))
}

/// Integral `b` with `a . b = target`.
pub fn coeff_vector(a: &[BigInt], target: &BigInt) -> Result<IntVec> {
    let (w, g) = unimodular_column_reduction(a);
    if g.is_zero() {
        return if target.is_zero() {
            Ok(vec![BigInt::zero(); a.len()])
        } else {
            Err(Error::Divisibility { target: target.to_string(), gcd: "0".into() })
        };
    }
    let (q, rem) = target.div_rem(&g);
    if !rem.is_zero() {
        return Err(Error::Divisibility { target: target.to_string(), gcd: g.to_string() });
    }
    Ok(w.col(0).into_iter().map(|x| x * &q).collect())
}

/// One nearest-plane pass: subtracts rounded Gram-Schmidt projections of `x`
/// onto the basis columns, last column first. The result differs from `x`
/// by a lattice vector.
pub fn nearest_plane(x: &[BigInt], basis: &IntMat) -> Result<IntVec> {
    if basis.rows() != x.len() {
        return Err(Error::Dimension(format!("{}-vector against {}-row basis", x.len(), basis.rows())));
    }
    if basis.cols() == 0 {
        return Ok(x.to_vec());
    }
    let g = gram_schmidt(basis)?;
    let mut y = x.to_vec();
    for j in (0..basis.cols()).rev() {
        let c = round_half_away(&(dot_rat(&to_rat_vec(&y), &g.ortho[j]) / &g.norms_sq[j]));
        if c.is_zero() {
            continue;
        }
        for (yi, bi) in y.iter_mut().zip(basis.col(j)) {
            *yi -= &c * bi;
        }
    }
    Ok(y)
}

/// Witness for the completeness of the lattice generated by the columns of `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletenessCertificate {
    /// Unimodular; `Z V = [I_k; 0]` when `complete` holds.
    pub z: IntMat,
    pub complete: bool,
    /// Gram determinant of the last `n - k` rows of `Z` equals `det(V^T V)`.
    pub det_match: bool,
}

impl CompletenessCertificate {
    pub fn ok(&self) -> bool {
        self.complete && self.det_match
    }

    /// Basis (as rows) of the orthogonal lattice.
    pub fn orthogonal_rows(&self, k: usize) -> IntMat {
        let idx: Vec<usize> = (k..self.z.rows()).collect();
        self.z.select_rows(&idx)
    }
}

/// Row-reduces `V` by unimodular operations. The lattice is complete exactly
/// when the resulting triangular block has unit diagonal; that block is then
/// cleared to the identity.
pub fn completeness_certificate(v: &IntMat) -> Result<CompletenessCertificate> {
    let (n, k) = (v.rows(), v.cols());
    let mut m = v.row_vecs();
    let mut z = Matrix::<BigInt>::identity(n).row_vecs();
    for j in 0..k {
        for i in j + 1..n {
            if m[i][j].is_zero() {
                continue;
            }
            if m[j][j].is_zero() {
                m.swap(i, j);
                z.swap(i, j);
                continue;
            }
            let (g, x, y) = ext_gcd(&m[j][j], &m[i][j]);
            let (p, q) = (&m[j][j] / &g, &m[i][j] / &g);
            for rows in [&mut m, &mut z] {
                let (rj, ri) = (rows[j].clone(), rows[i].clone());
                rows[j] = rj.iter().zip(&ri).map(|(s, t)| &x * s + &y * t).collect();
                rows[i] = rj.iter().zip(&ri).map(|(s, t)| -&q * s + &p * t).collect();
            }
        }
        if m[j][j].is_zero() {
            return Err(Error::DependentColumns { index: j });
        }
        if m[j][j].is_negative() {
            for rows in [&mut m, &mut z] {
                rows[j].iter_mut().for_each(|x| *x = -x.clone());
            }
        }
    }
    let complete = (0..k).all(|j| m[j][j].is_one());
    if complete {
        for j in (0..k).rev() {
            for i in 0..j {
                let c = m[i][j].clone();
                if c.is_zero() {
                    continue;
                }
                for rows in [&mut m, &mut z] {
                    let rj = rows[j].clone();
                    rows[i].iter_mut().zip(&rj).for_each(|(s, t)| *s -= &c * t);
                }
            }
        }
    }
    let z = Matrix::from_rows(z)?;
    let det_match = if complete {
        let bottom: Vec<usize> = (k..n).collect();
        let perp = if bottom.is_empty() { BigInt::one() } else { gram_det(&z.select_rows(&bottom))? };
        let own = if k == 0 { BigInt::one() } else { gram_det(&v.transpose())? };
        perp == own
    } else {
        false
    };
    Ok(CompletenessCertificate { z, complete, det_match })
}

/// `(det L_l)^2 <= 2^(l(n-l)/2) (det L)^(2l/n)` for the first `l` basis columns,
/// compared as `G_l^(2n) <= 2^(l(n-l)n) G^(2l)` with `G` the Gram determinants.
pub fn sublattice_det_check(basis: &IntMat, l: usize) -> Result<bool> {
    let n = basis.cols();
    if l == 0 || l > n {
        return Err(Error::Invalid(format!("sublattice index {l} outside 1..={n}")));
    }
    let bt = basis.transpose();
    let first: Vec<usize> = (0..l).collect();
    let g_l = gram_det(&bt.select_rows(&first))?;
    let g = gram_det(&bt)?;
    let lhs = num_traits::pow(g_l, 2 * n);
    let rhs = (num_traits::pow(g, 2 * l)) << (l * (n - l) * n);
    Ok(lhs <= rhs)
}

/// Integral coordinates of `target` in the column basis, if it lies in the lattice.
pub fn lattice_coords(basis: &IntMat, target: &[BigInt]) -> Result<Option<IntVec>> {
    let sol = crate::exact::solve(&basis.to_rational(), &to_rat_vec(target));
    match sol {
        Ok(x) => Ok(x.iter().all(|q: &Rational| q.denom().is_one()).then(|| x.iter().map(|q| q.numer().clone()).collect())),
        Err(Error::Invalid(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
