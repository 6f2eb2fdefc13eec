//! Near-parallel directions: the decomposition `a = lambda p + r` with
//! `r` orthogonal to `p`, extraction of `p` from reformulation transforms,
//! and exact certification of the associated bounds.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{
    dot_int, dot_rat, gram_det, inverse_integral, norm_sq_int, norm_sq_rat, rat_int, round_half_away, solve, to_rat_vec,
    IntMat, IntVec, Matrix, RadicalTerm, RatVec, Rational,
};
use crate::reform::{check_hypothesis, NullspaceReform, RangespaceReform};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub p: IntVec,
    pub lambda: Rational,
    pub r: RatVec,
    pub a_norm_sq: BigInt,
    pub p_norm_sq: BigInt,
    pub r_norm_sq: Rational,
}

impl Decomposition {
    /// `(|r| / lambda)^2`.
    pub fn ratio_sq(&self) -> Rational {
        &self.r_norm_sq / (&self.lambda * &self.lambda)
    }

    /// `sin^2(a, p) = |r|^2 / |a|^2`.
    pub fn sin_sq(&self) -> Rational {
        &self.r_norm_sq / rat_int(&self.a_norm_sq)
    }

    pub fn lambda_sq(&self) -> Rational {
        &self.lambda * &self.lambda
    }
}

/// Writes `a = lambda p + r` with `r . p = 0`, negating `p` if needed so that `lambda > 0`.
pub fn decompose(a: &[BigInt], p: &[BigInt]) -> Result<Decomposition> {
    if a.len() != p.len() {
        return Err(Error::Dimension(format!("a has length {}, p has length {}", a.len(), p.len())));
    }
    if p.iter().all(Zero::is_zero) {
        return Err(Error::Invalid("zero direction".into()));
    }
    let mut ap = dot_int(a, p);
    let mut p = p.to_vec();
    if ap.is_zero() {
        return Err(Error::OrthogonalDirection);
    }
    if ap.is_negative() {
        p.iter_mut().for_each(|x| *x = -&*x);
        ap = -ap;
    }
    let p_norm_sq = norm_sq_int(&p);
    let lambda = Rational::new(ap, p_norm_sq.clone());
    let r: RatVec = a.iter().zip(&p).map(|(ai, pi)| rat_int(ai) - &lambda * rat_int(pi)).collect();
    let r_norm_sq = norm_sq_rat(&r);
    Ok(Decomposition { p, lambda, r, a_norm_sq: norm_sq_int(a), p_norm_sq, r_norm_sq })
}

/// The last row of `U^-1`.
pub fn extract_range_direction(reform: &RangespaceReform) -> IntVec {
    reform.u_inv.row(reform.u_inv.rows() - 1).to_vec()
}

/// `(V, b)^-1`, checked to end in the row `a`.
pub fn null_inverse(reform: &NullspaceReform) -> Result<IntMat> {
    let n = reform.instance.n();
    let vb = reform.v_basis.hstack(&Matrix::from_cols(vec![reform.b.clone()], n)?)?;
    let inv = inverse_integral(&vb)?;
    if inv.row(n - 1) != reform.instance.a() {
        return Err(Error::Invalid("last row of (V, b)^-1 differs from a".into()));
    }
    Ok(inv)
}

/// The next-to-last row of `(V, b)^-1`.
pub fn extract_null_direction(reform: &NullspaceReform) -> Result<IntVec> {
    let inv = null_inverse(reform)?;
    Ok(inv.row(inv.rows() - 2).to_vec())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeCheck {
    pub hyp: bool,
    pub i1: bool,
    pub i2: bool,
    pub i3: bool,
}

impl RangeCheck {
    pub fn all(&self) -> bool {
        self.i1 && self.i2 && self.i3
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullCheck {
    pub hyp: bool,
    pub i1: bool,
    pub i2: bool,
    pub r_nonzero: bool,
}

impl NullCheck {
    pub fn all(&self) -> bool {
        self.i1 && self.i2 && self.r_nonzero
    }
}

fn r2(x: i64, y: i64) -> Rational {
    Rational::new(BigInt::from(x), BigInt::from(y))
}

/// `coeff * 2^((k(n-k)+1)/2) / |a|^(2k/n)`, i.e. `coeff * f(a,k)^2`.
fn range_factor_sq(coeff: Rational, n: usize, k: usize, a_norm_sq: &BigInt) -> Result<RadicalTerm> {
    let (n, k) = (n as i64, k as i64);
    RadicalTerm::from_powers(coeff, &[(r2(2, 1), r2(k * (n - k) + 1, 2)), (rat_int(a_norm_sq), r2(-k, n))])
}

/// `coeff * 2^(k(n-1-k)/2) / |a|^(2k/(n-1))`, i.e. `coeff * g(a,k)^2`.
fn null_factor_sq(coeff: Rational, n: usize, k: usize, a_norm_sq: &BigInt) -> Result<RadicalTerm> {
    let (n, k) = (n as i64, k as i64);
    RadicalTerm::from_powers(coeff, &[(r2(2, 1), r2(k * (n - 1 - k), 2)), (rat_int(a_norm_sq), r2(-k, n - 1))])
}

/// `rhs >= lhs`, with the right side a single radical.
fn at_least(rhs: &RadicalTerm, lhs: &Rational) -> bool {
    rhs.cmp_rational(lhs) != Ordering::Less
}

fn range_items(a: &[BigInt], k: usize, gram: &BigInt, r_norm_sq: &Rational, lambda_sq: &Rational) -> Result<RangeCheck> {
    let n = a.len();
    let an = norm_sq_int(a);
    let lhs1 = rat_int(gram) * (Rational::one() + r_norm_sq);
    let i1 = at_least(&range_factor_sq(rat_int(&an), n, k, &an)?, &lhs1);
    let i2 = at_least(&range_factor_sq(lambda_sq.clone(), n, k, &an)?, &Rational::one());
    let i3 = at_least(&range_factor_sq(r2(4, 1), n, k, &an)?, &(r_norm_sq / lambda_sq));
    Ok(RangeCheck { hyp: check_hypothesis(a), i1, i2, i3 })
}

fn null_items(a: &[BigInt], k: usize, gram: &BigInt, r_norm_sq: &Rational, lambda_sq: &Rational) -> Result<NullCheck> {
    let n = a.len();
    if n < 2 {
        return Err(Error::Dimension("nullspace bounds need n >= 2".into()));
    }
    let an = norm_sq_int(a);
    let i1 = at_least(&null_factor_sq(rat_int(&an), n, k, &an)?, &(rat_int(gram) * r_norm_sq));
    let i2 = at_least(&null_factor_sq(r2(4, 1), n, k, &an)?, &(r_norm_sq / lambda_sq));
    Ok(NullCheck { hyp: check_hypothesis(a), i1, i2, r_nonzero: !r_norm_sq.is_zero() })
}

/// Bounds for the rangespace direction: `|p|^2 (1 + |r|^2) <= |a|^2 f(a)^2`,
/// `lambda >= 1/f(a)` and `|r|/lambda <= 2 f(a)`, with `f(a) = 2^(n/4) / |a|^(1/n)`.
pub fn certify_range_direction(a: &[BigInt], dec: &Decomposition) -> Result<RangeCheck> {
    range_items(a, 1, &dec.p_norm_sq, &dec.r_norm_sq, &dec.lambda_sq())
}

/// Bounds for the nullspace direction: `|p| |r| <= |a| g(a)`, `|r|/lambda <= 2 g(a)`
/// and `r != 0`, with `g(a) = 2^((n-2)/4) / |a|^(1/(n-1))`.
pub fn certify_null_direction(a: &[BigInt], dec: &Decomposition) -> Result<NullCheck> {
    null_items(a, 1, &dec.p_norm_sq, &dec.r_norm_sq, &dec.lambda_sq())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelnessCheck {
    pub sin_le_ratio: bool,
    /// Evaluated only when `|r|/lambda < 1`.
    pub sign_agree: Option<bool>,
    /// Evaluated only when `|r|/lambda < 1/2`.
    pub rounding: Option<bool>,
}

pub fn check_parallelness(a: &[BigInt], p: &[BigInt]) -> Result<ParallelnessCheck> {
    let dec = decompose(a, p)?;
    let ratio_sq = dec.ratio_sq();
    let sin_le_ratio = dec.sin_sq() <= ratio_sq;
    let sign_agree = (ratio_sq < Rational::one()).then(|| {
        a.iter().zip(&dec.p).filter(|(_, pi)| !pi.is_zero()).all(|(ai, pi)| ai.signum() == pi.signum())
    });
    let rounding = (ratio_sq < r2(1, 4))
        .then(|| a.iter().zip(&dec.p).all(|(ai, pi)| round_half_away(&(rat_int(ai) / &dec.lambda)) == *pi));
    Ok(ParallelnessCheck { sin_le_ratio, sign_agree, rounding })
}

/// Which block of rows of the source matrix spans the approximating subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowWindow {
    /// The last `k` rows (rows of `U^-1`).
    Last,
    /// The `k` rows just before the last one (rows of `(V, b)^-1`).
    NextToLast,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessiveApprox {
    pub k: usize,
    pub rows: IntMat,
    pub projection: RatVec,
    pub r: RatVec,
    pub r_norm_sq: Rational,
    /// `det(P P^T)`.
    pub gram: BigInt,
    /// `|a(k)|^2 / det(P P^T)`.
    pub lambda_sq: Rational,
}

impl SuccessiveApprox {
    pub fn ratio_sq(&self) -> Rational {
        &self.r_norm_sq / &self.lambda_sq
    }
}

/// Projects `a` onto the row space of a block of `k` rows of `source`.
pub fn successive(source: &IntMat, window: RowWindow, a: &[BigInt], k: usize) -> Result<SuccessiveApprox> {
    let m = source.rows();
    if source.cols() != a.len() {
        return Err(Error::Dimension(format!("source has {} columns, a has length {}", source.cols(), a.len())));
    }
    let avail = match window {
        RowWindow::Last => m,
        RowWindow::NextToLast => m.saturating_sub(1),
    };
    if k == 0 || k > avail {
        return Err(Error::Dimension(format!("k = {k} outside 1..={avail}")));
    }
    let end = match window {
        RowWindow::Last => m,
        RowWindow::NextToLast => m - 1,
    };
    let idx: Vec<usize> = (end - k..end).collect();
    let rows = source.select_rows(&idx);
    let gram = gram_det(&rows)?;
    let pr = rows.to_rational();
    let ppt = pr.mul(&pr.transpose())?;
    let pa = pr.mul_vec(&to_rat_vec(a))?;
    let y = solve(&ppt, &pa)?;
    let projection = pr.vec_mul(&y)?;
    let r: RatVec = a.iter().zip(&projection).map(|(ai, qi)| rat_int(ai) - qi).collect();
    let proj_sq = norm_sq_rat(&projection);
    if proj_sq.is_zero() {
        return Err(Error::OrthogonalDirection);
    }
    debug_assert!(pr.row_vecs().iter().all(|row| dot_rat(row, &r).is_zero()));
    Ok(SuccessiveApprox {
        k,
        r_norm_sq: norm_sq_rat(&r),
        lambda_sq: proj_sq / rat_int(&gram),
        rows,
        projection,
        r,
        gram,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessiveRangeCheck {
    pub k: usize,
    pub items: RangeCheck,
    /// `sin^2(a, a(k)) <= (|r|/lambda_k)^2`.
    pub sin: bool,
}

impl SuccessiveRangeCheck {
    pub fn all(&self) -> bool {
        self.items.all() && self.sin
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessiveNullCheck {
    pub k: usize,
    pub items: NullCheck,
    pub sin: bool,
}

impl SuccessiveNullCheck {
    pub fn all(&self) -> bool {
        self.items.all() && self.sin
    }
}

fn sin_item(a: &[BigInt], s: &SuccessiveApprox) -> bool {
    &s.r_norm_sq / rat_int(&norm_sq_int(a)) <= s.ratio_sq()
}

/// Range bounds for a block of the last `k` rows of `U^-1`, with
/// `f(a,k) = 2^((k(n-k)+1)/4) / |a|^(k/n)`.
pub fn certify_range_block(a: &[BigInt], s: &SuccessiveApprox) -> Result<SuccessiveRangeCheck> {
    let items = range_items(a, s.k, &s.gram, &s.r_norm_sq, &s.lambda_sq)?;
    Ok(SuccessiveRangeCheck { k: s.k, items, sin: sin_item(a, s) })
}

/// Null bounds for a block of the next-to-last `k` rows of `(V, b)^-1`, with
/// `g(a,k) = 2^(k(n-1-k)/4) / |a|^(k/(n-1))`.
pub fn certify_null_block(a: &[BigInt], s: &SuccessiveApprox) -> Result<SuccessiveNullCheck> {
    let items = null_items(a, s.k, &s.gram, &s.r_norm_sq, &s.lambda_sq)?;
    Ok(SuccessiveNullCheck { k: s.k, items, sin: sin_item(a, s) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, int_vec, parse_rational, rat};
    use crate::reform::{build_nullspace, build_rangespace, KnapsackInstance};
    use proptest::prelude::*;

    const EXAMPLE: [i64; 5] = [3488, 451, 1231, 6415, 2191];

    fn instance(a: &[BigInt], beta: BigInt) -> KnapsackInstance {
        let v = vec![BigInt::one(); a.len()];
        let beta = beta.min(a.iter().sum());
        KnapsackInstance::new(a.to_vec(), v, beta.clone(), beta).unwrap()
    }

    fn huge(n: usize, seed: u64) -> IntVec {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let bits = (n + 2) * n / 2 + 4;
        loop {
            let a: IntVec = (0..n)
                .map(|_| {
                    let hi: u64 = rng.gen_range(1..1 << 20);
                    (BigInt::from(hi) << bits) + BigInt::from(rng.gen::<u32>())
                })
                .collect();
            if crate::exact::gcd_vec(&a).is_one() {
                return a;
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&int_vec(&[4, 2]), &int_vec(&[2, 1])).unwrap();
        assert_eq!(d.lambda, rat(2, 1));
        assert!(d.r_norm_sq.is_zero());
        let d = decompose(&int_vec(&[5, 2]), &int_vec(&[2, 1])).unwrap();
        assert_eq!(d.lambda, rat(12, 5));
        assert_eq!(d.r, vec![rat(1, 5), rat(-2, 5)]);
        let d = decompose(&int_vec(&[5, 2]), &int_vec(&[-2, -1])).unwrap();
        assert_eq!(d.p, int_vec(&[2, 1]));
        assert_eq!(decompose(&int_vec(&[1, 1]), &int_vec(&[1, -1])), Err(Error::OrthogonalDirection));
        let d = decompose(&int_vec(&[101, 100]), &int_vec(&[11, 10])).unwrap();
        assert_eq!(d.ratio_sq(), rat(1790100, 4456321));
    }

    #[test]
    fn example_range_direction() {
        let a = int_vec(&EXAMPLE);
        let r = build_rangespace(&instance(&a, int(0))).unwrap();
        let p = extract_range_direction(&r);
        let d = decompose(&a, &p).unwrap();
        assert!(d.ratio_sq() <= rat(14 * 14, 10000));
        let c = certify_range_direction(&a, &d).unwrap();
        assert!(!c.hyp);
        let pc = check_parallelness(&a, &d.p).unwrap();
        assert_eq!(pc.rounding, Some(true));
    }

    #[test]
    fn example_vectors() {
        let a = int_vec(&EXAMPLE);
        let d1 = decompose(&a, &int_vec(&[62, 8, 22, 114, 39])).unwrap();
        let lam = parse_rational("56.2539").unwrap();
        assert!((&d1.lambda - lam).abs() < rat(1, 1000));
        let d2 = decompose(&a, &int_vec(&[12204, 1578, 4307, 22445, 7666])).unwrap();
        assert!((&d2.lambda - parse_rational("0.2858").unwrap()).abs() < rat(1, 1000));
        assert_eq!(check_parallelness(&a, &d1.p).unwrap().rounding, Some(true));
    }

    #[test]
    fn example_null_direction() {
        let a = int_vec(&EXAMPLE);
        let r = build_nullspace(&instance(&a, int(5000))).unwrap();
        let p = extract_null_direction(&r).unwrap();
        let d = decompose(&a, &p).unwrap();
        assert!(d.ratio_sq() <= rat(12 * 12, 10000));
        assert!(certify_null_direction(&a, &d).unwrap().r_nonzero);
    }

    #[test]
    fn two_by_two_null_inverse() {
        let a = int_vec(&[2, 3]);
        let r = build_nullspace(&instance(&a, int(5))).unwrap();
        let inv = null_inverse(&r).unwrap();
        assert_eq!(inv.row(1), &a[..]);
        assert!(!dot_int(&a, inv.row(0)).is_zero());
    }

    #[test]
    fn trivial_range_direction() {
        let r = build_rangespace(&KnapsackInstance::new(int_vec(&[1]), int_vec(&[2]), int(0), int(1)).unwrap()).unwrap();
        assert!(extract_range_direction(&r)[0].abs().is_one());
    }

    #[test]
    fn planted_direction() {
        let a: IntVec = int_vec(&[3001, 5000, 6999]);
        let r = build_rangespace(&instance(&a, int(0))).unwrap();
        let d = decompose(&a, &extract_range_direction(&r)).unwrap();
        assert_eq!(d.p, int_vec(&[3, 5, 7]));
    }

    #[test]
    fn planted_two_dim_all_true() {
        let a = vec![BigInt::one() << 40u32, (BigInt::one() << 40u32) + 1];
        let r = build_rangespace(&instance(&a, int(0))).unwrap();
        let d = decompose(&a, &extract_range_direction(&r)).unwrap();
        let c = certify_range_direction(&a, &d).unwrap();
        assert!(c.hyp && c.all(), "{c:?}");
    }

    #[test]
    fn planted_three_dim_null_all_true() {
        let a = huge(3, 7);
        let r = build_nullspace(&instance(&a, int(0))).unwrap();
        let d = decompose(&a, &extract_null_direction(&r).unwrap()).unwrap();
        let c = certify_null_direction(&a, &d).unwrap();
        assert!(c.hyp && c.all(), "{c:?}");
    }

    #[test]
    fn parallelness_trivial_and_family() {
        let c = check_parallelness(&int_vec(&[4, 2]), &int_vec(&[2, 1])).unwrap();
        assert_eq!(c, ParallelnessCheck { sin_le_ratio: true, sign_agree: Some(true), rounding: Some(true) });
        let mut last = Rational::zero();
        for m in [10i64, 100, 1000] {
            let d = decompose(&int_vec(&[m * m + 1, m * m]), &int_vec(&[m + 1, m])).unwrap();
            assert!(d.ratio_sq() > last && d.ratio_sq() < rat(1, 2));
            last = d.ratio_sq();
            assert!(check_parallelness(&int_vec(&[m * m + 1, m * m]), &int_vec(&[m + 1, m])).unwrap().sin_le_ratio);
        }
    }

    #[test]
    fn successive_full_rank_is_exact() {
        let a = int_vec(&EXAMPLE);
        let r = build_rangespace(&instance(&a, int(0))).unwrap();
        let s = successive(&r.u_inv, RowWindow::Last, &a, 5).unwrap();
        assert!(s.r_norm_sq.is_zero());
        assert_eq!(s.projection, to_rat_vec(&a));
        assert!(certify_range_block(&a, &s).unwrap().sin);
        assert!(successive(&r.u_inv, RowWindow::Last, &a, 6).is_err());
        assert!(successive(&r.u_inv, RowWindow::NextToLast, &a, 5).is_err());
    }

    #[test]
    fn successive_k1_matches_decompose() {
        for n in 2..=6 {
            let a = huge(n, n as u64);
            let rr = build_rangespace(&instance(&a, int(0))).unwrap();
            let d = decompose(&a, &extract_range_direction(&rr)).unwrap();
            let s = successive(&rr.u_inv, RowWindow::Last, &a, 1).unwrap();
            assert_eq!(s.r, d.r);
            assert_eq!(s.lambda_sq, d.lambda_sq());
            assert_eq!(certify_range_block(&a, &s).unwrap().items, certify_range_direction(&a, &d).unwrap());

            let nr = build_nullspace(&instance(&a, int(0))).unwrap();
            let d = decompose(&a, &extract_null_direction(&nr).unwrap()).unwrap();
            let s = successive(&null_inverse(&nr).unwrap(), RowWindow::NextToLast, &a, 1).unwrap();
            assert_eq!(s.r, d.r);
            assert_eq!(certify_null_block(&a, &s).unwrap().items, certify_null_direction(&a, &d).unwrap());
        }
    }

    #[test]
    fn successive_planted_all_true() {
        for n in 4..=6 {
            let a = huge(n, 100 + n as u64);
            let rr = build_rangespace(&instance(&a, int(0))).unwrap();
            let nr = build_nullspace(&instance(&a, int(0))).unwrap();
            let ninv = null_inverse(&nr).unwrap();
            for k in 1..=3 {
                let s = successive(&rr.u_inv, RowWindow::Last, &a, k).unwrap();
                assert!(certify_range_block(&a, &s).unwrap().all(), "n={n} k={k}");
                let s = successive(&ninv, RowWindow::NextToLast, &a, k).unwrap();
                assert!(certify_null_block(&a, &s).unwrap().all(), "n={n} k={k}");
            }
        }
    }

    proptest! {
        #[test]
        fn decomposition_is_exact(a in prop::collection::vec(-1000i64..1000, 1..6), p in prop::collection::vec(-50i64..50, 6)) {
            let a = int_vec(&a);
            let p = int_vec(&p[..a.len()]);
            match decompose(&a, &p) {
                Ok(d) => {
                    let back: RatVec = d.p.iter().zip(&d.r).map(|(pi, ri)| &d.lambda * rat_int(pi) + ri).collect();
                    prop_assert_eq!(back, to_rat_vec(&a));
                    prop_assert!(dot_rat(&to_rat_vec(&d.p), &d.r).is_zero());
                    prop_assert!(d.lambda.is_positive());
                    prop_assert!(check_parallelness(&a, &p).unwrap().sin_le_ratio);
                }
                Err(Error::OrthogonalDirection) => prop_assert!(dot_int(&a, &p).is_zero()),
                Err(Error::Invalid(_)) => prop_assert!(p.iter().all(Zero::is_zero)),
                Err(e) => prop_assert!(false, "unexpected {}", e),
            }
        }

        #[test]
        fn null_inverse_ends_in_a(a in prop::collection::vec(1i64..100_000, 2..=6)) {
            let a = int_vec(&a);
            prop_assume!(crate::exact::gcd_vec(&a).is_one());
            let r = build_nullspace(&instance(&a, int(0))).unwrap();
            prop_assert!(null_inverse(&r).is_ok());
        }

        #[test]
        fn hypothesis_implies_certificates(n in 2usize..=6, seed in any::<u64>()) {
            let a = huge(n, seed);
            prop_assert!(check_hypothesis(&a));
            let rr = build_rangespace(&instance(&a, int(0))).unwrap();
            let d = decompose(&a, &extract_range_direction(&rr)).unwrap();
            prop_assert!(certify_range_direction(&a, &d).unwrap().all());
            let nr = build_nullspace(&instance(&a, int(0))).unwrap();
            let d = decompose(&a, &extract_null_direction(&nr).unwrap()).unwrap();
            prop_assert!(certify_null_direction(&a, &d).unwrap().all());
        }
    }
}
