//! Exact scalars, dense vectors and matrices, and certified radical arithmetic.
//!
//! Integers and rationals are `num-bigint` / `num-rational` values. A
//! `BigRational` is always kept in lowest terms with a positive denominator,
//! so every value produced here satisfies that invariant.

pub mod decimal;
pub mod matrix;
pub mod radical;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use matrix::{det_int, det_rat, gram_det, inverse_integral, inverse_rational, solve, Matrix};
pub use radical::{cmp_roots, floor_radical, RadicalExpr, RadicalTerm};

pub type Integer = BigInt;
pub type Rational = BigRational;
pub type IntVec = Vec<Integer>;
pub type RatVec = Vec<Rational>;
pub type IntMat = Matrix<Integer>;
pub type RatMat = Matrix<Rational>;

pub fn int(v: i64) -> Integer {
    Integer::from(v)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(Integer::from(n), Integer::from(d))
}

pub fn rat_int(v: &Integer) -> Rational {
    Rational::from_integer(v.clone())
}

pub fn int_vec(v: &[i64]) -> IntVec {
    v.iter().map(|&x| Integer::from(x)).collect()
}

pub fn to_rat_vec(v: &[Integer]) -> RatVec {
    v.iter().map(rat_int).collect()
}

pub fn dot_int(a: &[Integer], b: &[Integer]) -> Integer {
    assert_eq!(a.len(), b.len(), "dot product of vectors with different lengths");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_rat(a: &[Rational], b: &[Rational]) -> Rational {
    assert_eq!(a.len(), b.len(), "dot product of vectors with different lengths");
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_sq_int(a: &[Integer]) -> Integer {
    a.iter().map(|x| x * x).sum()
}

pub fn norm_sq_rat(a: &[Rational]) -> Rational {
    dot_rat(a, a)
}

pub fn gcd_vec(a: &[Integer]) -> Integer {
    a.iter().fold(Integer::zero(), |g, x| g.gcd(x))
}

pub fn max_abs(a: &[Integer]) -> Integer {
    a.iter().map(|x| x.abs()).max().unwrap_or_else(Integer::zero)
}

pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn unit_vec(n: usize, i: usize) -> IntVec {
    (0..n).map(|j| if i == j { Integer::one() } else { Integer::zero() }).collect()
}

/// Nearest integer, ties rounded away from zero.
pub fn round_half_away(q: &Rational) -> Integer {
    let half = rat(1, 2);
    if q.is_negative() {
        -(-q + half).floor().to_integer()
    } else {
        (q + half).floor().to_integer()
    }
}

/// Extended Euclid: returns `(g, x, y)` with `g = gcd(a, b) >= 0` and `a x + b y = g`.
pub fn ext_gcd(a: &Integer, b: &Integer) -> (Integer, Integer, Integer) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Integer::one(), Integer::zero());
    let (mut old_t, mut t) = (Integer::zero(), Integer::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Renders a rational as `num` or `num/den`.
pub fn rat_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: Integer = n.trim().parse().ok()?;
            let d: Integer = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => {
            if let Some((ip, fp)) = s.split_once('.') {
                let neg = ip.starts_with('-');
                let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
                let n: Integer = digits.parse().ok()?;
                let d = num_traits::pow(Integer::from(10), fp.len());
                let q = Rational::new(n, d);
                Some(if neg { -q } else { q })
            } else {
                Some(Rational::from_integer(s.parse().ok()?))
            }
        }
    }
}
