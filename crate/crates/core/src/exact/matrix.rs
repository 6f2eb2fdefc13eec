use std::ops::{Add, Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_cols(cols: Vec<Vec<T>>, rows: usize) -> Result<Self> {
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension("ragged columns".into()));
        }
        Ok(Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i].clone()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)].clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])].clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Dimension(format!("vstack {} vs {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!("hstack {} vs {} rows", self.rows, other.rows)));
        }
        Ok(Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        }))
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero,
    for<'a> &'a T: Mul<&'a T, Output = T>,
    T: Add<T, Output = T>,
{
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(T::zero(), |acc, k| acc + &self[(i, k)] * &other[(k, j)])
        }))
    }

    /// `M x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if self.cols != x.len() {
            return Err(Error::Dimension(format!("{}x{} times {}-vector", self.rows, self.cols, x.len())));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(), |acc, (m, v)| acc + m * v))
            .collect())
    }

    /// `y M` for a row vector `y`.
    pub fn vec_mul(&self, y: &[T]) -> Result<Vec<T>> {
        if self.rows != y.len() {
            return Err(Error::Dimension(format!("{}-vector times {}x{}", y.len(), self.rows, self.cols)));
        }
        Ok((0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + &y[i] * &self[(i, j)]))
            .collect())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix<BigInt> {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn to_rational(&self) -> Matrix<BigRational> {
        self.map(|x| BigRational::from_integer(x.clone()))
    }
}

impl Matrix<BigRational> {
    /// Returns the integral matrix if every entry is an integer.
    pub fn to_integral(&self) -> Option<Matrix<BigInt>> {
        if self.data.iter().all(|q| q.denom().is_one()) {
            Some(self.map(|q| q.numer().clone()))
        } else {
            None
        }
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det_int(m: &Matrix<BigInt>) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of {}x{}", m.rows, m.cols)));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.row_vecs();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

/// Determinant of a rational matrix by Gaussian elimination.
pub fn det_rat(m: &Matrix<BigRational>) -> Result<BigRational> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of {}x{}", m.rows, m.cols)));
    }
    let n = m.rows;
    let mut a = m.row_vecs();
    let mut det = BigRational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(BigRational::zero());
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= &a[k][k];
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &a[k][k];
            for j in k..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
            }
        }
    }
    Ok(det)
}

/// `det(P P^T)` for a `k x n` integral matrix; an error if the rows are dependent.
pub fn gram_det(p: &Matrix<BigInt>) -> Result<BigInt> {
    let g = p.mul(&p.transpose())?;
    let d = det_int(&g)?;
    if d.is_zero() {
        Err(Error::DependentRows)
    } else {
        Ok(d)
    }
}

/// Exact inverse by Gauss-Jordan elimination.
pub fn inverse_rational(m: &Matrix<BigRational>) -> Result<Matrix<BigRational>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("inverse of {}x{}", m.rows, m.cols)));
    }
    let n = m.rows;
    let mut a = m.row_vecs();
    let mut inv = Matrix::<BigRational>::identity(n).row_vecs();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero()).ok_or(Error::Singular)?;
        a.swap(p, k);
        inv.swap(p, k);
        let piv = a[k][k].clone();
        for j in 0..n {
            a[k][j] /= &piv;
            inv[k][j] /= &piv;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                let v = &f * &a[k][j];
                a[i][j] -= v;
                let w = &f * &inv[k][j];
                inv[i][j] -= w;
            }
        }
    }
    Matrix::from_rows(inv)
}

/// Inverse of an integral matrix that must itself be integral (|det| = 1).
pub fn inverse_integral(m: &Matrix<BigInt>) -> Result<Matrix<BigInt>> {
    inverse_rational(&m.to_rational())?
        .to_integral()
        .ok_or_else(|| Error::Invalid("matrix is not unimodular: inverse is fractional".into()))
}

/// Solves `A x = b` for a matrix with full column rank; an error if the
/// columns are dependent or the system is inconsistent.
pub fn solve(a: &Matrix<BigRational>, b: &[BigRational]) -> Result<Vec<BigRational>> {
    if a.rows != b.len() {
        return Err(Error::Dimension(format!("{}x{} system with {} right-hand sides", a.rows, a.cols, b.len())));
    }
    let (m, n) = (a.rows, a.cols);
    let mut t: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            let mut r = a.row(i).to_vec();
            r.push(b[i].clone());
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..m).find(|&i| !t[i][k].is_zero()).ok_or(Error::DependentColumns { index: k })?;
        t.swap(p, k);
        let piv = t[k][k].clone();
        for j in k..=n {
            t[k][j] /= &piv;
        }
        for i in 0..m {
            if i == k || t[i][k].is_zero() {
                continue;
            }
            let f = t[i][k].clone();
            for j in k..=n {
                let v = &f * &t[k][j];
                t[i][j] -= v;
            }
        }
    }
    if t[n..].iter().any(|r| !r[n].is_zero()) {
        return Err(Error::Invalid("inconsistent linear system".into()));
    }
    Ok(t.into_iter().take(n).map(|mut r| r.pop().unwrap()).collect())
}

/// Rank of a rational matrix.
pub fn rank(a: &Matrix<BigRational>) -> usize {
    let mut t = a.row_vecs();
    let (m, n) = (a.rows, a.cols);
    let mut r = 0;
    for k in 0..n {
        let Some(p) = (r..m).find(|&i| !t[i][k].is_zero()) else { continue };
        t.swap(p, r);
        for i in r + 1..m {
            if t[i][k].is_zero() {
                continue;
            }
            let f = &t[i][k] / &t[r][k];
            for j in k..n {
                let v = &f * &t[r][j];
                t[i][j] -= v;
            }
        }
        r += 1;
        if r == m {
            break;
        }
    }
    r
}

pub fn is_unimodular(m: &Matrix<BigInt>) -> bool {
    m.is_square() && det_int(m).map(|d| d.abs().is_one()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn cofactor_det(m: &[Vec<i64>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return m[0][0] as i128;
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] as i128 * cofactor_det(&minor)
            })
            .sum()
    }

    fn big(rows: &[Vec<i64>]) -> Matrix<BigInt> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(det_int(&Matrix::identity(3)).unwrap(), int(1));
        assert_eq!(det_int(&Matrix::from_i64(&[&[2, 0], &[0, 3]])).unwrap(), int(6));
        assert_eq!(det_int(&Matrix::from_i64(&[&[1, 2], &[2, 4]])).unwrap(), int(0));
        assert_eq!(det_int(&Matrix::from_i64(&[&[0, 1], &[1, 0]])).unwrap(), int(-1));
        assert!(det_int(&Matrix::<BigInt>::zeros(2, 3)).is_err());
    }

    #[test]
    fn gram_det_cases() {
        assert_eq!(gram_det(&Matrix::from_i64(&[&[3, 4]])).unwrap(), int(25));
        assert_eq!(gram_det(&Matrix::from_i64(&[&[1, 0, 0], &[0, 1, 0]])).unwrap(), int(1));
        assert_eq!(gram_det(&Matrix::from_i64(&[&[1, 1], &[1, -1]])).unwrap(), int(4));
        assert_eq!(gram_det(&Matrix::from_i64(&[&[1, 2], &[2, 4]])), Err(Error::DependentRows));
    }

    #[test]
    fn inverse_cases() {
        let id = Matrix::<BigInt>::identity(3);
        assert_eq!(inverse_integral(&id).unwrap(), id);
        let m = Matrix::from_i64(&[&[1, -4], &[0, 1]]);
        assert_eq!(inverse_integral(&m).unwrap(), Matrix::from_i64(&[&[1, 4], &[0, 1]]));
        assert_eq!(inverse_rational(&Matrix::from_i64(&[&[1, 2], &[2, 4]]).to_rational()), Err(Error::Singular));
        let half = inverse_rational(&Matrix::from_i64(&[&[2]]).to_rational()).unwrap();
        assert_eq!(half[(0, 0)], rat(1, 2));
        assert!(inverse_integral(&Matrix::from_i64(&[&[2]])).is_err());
    }

    #[test]
    fn solve_overdetermined() {
        let a = Matrix::from_i64(&[&[1, 0], &[0, 1], &[1, 1]]).to_rational();
        let x = solve(&a, &[rat(1, 1), rat(2, 1), rat(3, 1)]).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(2, 1)]);
        assert!(solve(&a, &[rat(1, 1), rat(2, 1), rat(4, 1)]).is_err());
    }

    #[test]
    fn rank_cases() {
        assert_eq!(rank(&Matrix::from_i64(&[&[1, 2], &[2, 4]]).to_rational()), 1);
        assert_eq!(rank(&Matrix::from_i64(&[&[1, 2, 3], &[0, 0, 1]]).to_rational()), 2);
        assert_eq!(rank(&Matrix::<BigInt>::zeros(2, 2).to_rational()), 0);
    }

    fn random_unimodular(ops: &[(usize, usize, i64)], n: usize) -> Matrix<BigInt> {
        let mut m = Matrix::<BigInt>::identity(n);
        for &(i, j, c) in ops {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            for k in 0..n {
                let v = &m[(j, k)] * int(c);
                m[(i, k)] += v;
            }
        }
        m
    }

    proptest! {
        #[test]
        fn det_matches_cofactor(rows in prop::collection::vec(prop::collection::vec(-9i64..=9, 5), 5)) {
            prop_assert_eq!(det_int(&big(&rows)).unwrap(), BigInt::from(cofactor_det(&rows)));
            prop_assert_eq!(det_rat(&big(&rows).to_rational()).unwrap(), BigRational::from_integer(BigInt::from(cofactor_det(&rows))));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn unimodular_inverse_multiplies_back(ops in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..12)) {
            let m = random_unimodular(&ops, 4);
            let inv = inverse_integral(&m).unwrap();
            prop_assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(4));
        }

        #[test]
        fn inverse_times_matrix_is_identity(n in 1usize..=6, seed in prop::collection::vec(-20i64..=20, 36)) {
            let m = Matrix::from_fn(n, n, |i, j| int(seed[i * 6 + j]));
            prop_assume!(!det_int(&m).unwrap().is_zero());
            let q = m.to_rational();
            let inv = inverse_rational(&q).unwrap();
            prop_assert_eq!(inv.mul(&q).unwrap(), Matrix::identity(n));
        }
    }
}
