//! Exact LP widths, integer widths and the branching bounds built on them.

mod polytope;
mod simplex;

pub use polytope::Polytope;
pub use simplex::{lp_optimize, LpOutcome, Sense};

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::approx::Decomposition;
use crate::error::{Error, Result};
use crate::exact::{norm_sq_int, rat_int, to_rat_vec, unit_vec, RadicalExpr, RadicalTerm, Rational};
use crate::reform::{KnapsackInstance, NullspaceReform, RangespaceReform};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthReport {
    /// `None` when the polytope is empty.
    pub cmax: Option<Rational>,
    pub cmin: Option<Rational>,
    pub width: Option<Rational>,
    pub iwidth: BigInt,
}

impl WidthReport {
    pub fn infeasible(&self) -> bool {
        self.cmax.is_none()
    }
}

/// `floor(max) - ceil(min) + 1`, clamped at zero, from two optimum values.
pub fn iwidth_from(cmax: &Rational, cmin: &Rational) -> BigInt {
    let w: BigInt = cmax.floor().to_integer() - cmin.ceil().to_integer() + 1;
    w.max(BigInt::zero())
}

pub fn width_report(c: &[BigInt], poly: &Polytope) -> Result<WidthReport> {
    let c = to_rat_vec(c);
    let hi = lp_optimize(&c, poly, Sense::Max)?;
    let lo = lp_optimize(&c, poly, Sense::Min)?;
    match (hi, lo) {
        (LpOutcome::Optimal { value: cmax, .. }, LpOutcome::Optimal { value: cmin, .. }) => {
            let iwidth = iwidth_from(&cmax, &cmin);
            Ok(WidthReport { width: Some(&cmax - &cmin), cmax: Some(cmax), cmin: Some(cmin), iwidth })
        }
        (LpOutcome::Unbounded, _) | (_, LpOutcome::Unbounded) => Err(Error::Unbounded),
        _ => Ok(WidthReport { cmax: None, cmin: None, width: None, iwidth: BigInt::zero() }),
    }
}

/// Number of integer hyperplanes `c x = t` meeting the polytope; zero when empty.
pub fn iwidth(c: &[BigInt], poly: &Polytope) -> Result<BigInt> {
    Ok(width_report(c, poly)?.iwidth)
}

fn conditional(w: &[Rational], ell: &BigInt, p: &[BigInt], v: &[BigInt], sense: Sense) -> Result<Rational> {
    let bound = Some(rat_int(ell));
    let (lo, hi) = match sense {
        Sense::Max => (None, bound),
        Sense::Min => (bound, None),
    };
    let poly = Polytope::unit_box(v).with_row(to_rat_vec(p), lo, hi);
    match lp_optimize(w, &poly, sense)? {
        LpOutcome::Optimal { value, .. } => Ok(value),
        LpOutcome::Infeasible => Err(Error::Infeasible),
        LpOutcome::Unbounded => Err(Error::Unbounded),
    }
}

/// `max {w x : p x <= ell, 0 <= x <= v}`.
pub fn cond_max(w: &[Rational], ell: &BigInt, p: &[BigInt], v: &[BigInt]) -> Result<Rational> {
    conditional(w, ell, p, v, Sense::Max)
}

/// `min {w x : p x >= ell, 0 <= x <= v}`.
pub fn cond_min(w: &[Rational], ell: &BigInt, p: &[BigInt], v: &[BigInt]) -> Result<Rational> {
    conditional(w, ell, p, v, Sense::Min)
}

/// `min(a, l2) - max(a, l1) >= -|r| |v| + lambda (l2 - l1)`, decided exactly.
pub fn claim_holds(a: &[BigInt], dec: &Decomposition, v: &[BigInt], l1: &BigInt, l2: &BigInt) -> Result<bool> {
    let ar = to_rat_vec(a);
    let gap = cond_min(&ar, l2, &dec.p, v)? - cond_max(&ar, l1, &dec.p, v)?;
    // gap + |r||v| >= lambda (l2 - l1)
    let lhs = RadicalExpr::sqrt(Rational::one(), &dec.r_norm_sq * rat_int(&norm_sq_int(v)))?.plus_rational(gap);
    Ok(lhs.cmp_rational(&(&dec.lambda * rat_int(&(l2 - l1))))? != Ordering::Less)
}

/// `floor(|r| |v| / lambda + (beta2 - beta1) / lambda) + 1` for a decomposition with `p >= 0`.
pub fn branch_bound(dec: &Decomposition, v: &[BigInt], beta1: &BigInt, beta2: &BigInt) -> Result<BigInt> {
    if let Some(index) = dec.p.iter().position(Signed::is_negative) {
        return Err(Error::NegativeDirection { index });
    }
    let radicand = &dec.r_norm_sq * rat_int(&norm_sq_int(v)) / dec.lambda_sq();
    let e = RadicalExpr::sqrt(Rational::one(), radicand)?.plus_rational(rat_int(&(beta2 - beta1)) / &dec.lambda);
    Ok(e.floor()? + 1)
}

fn r2(x: i64, y: i64) -> Rational {
    Rational::new(BigInt::from(x), BigInt::from(y))
}

/// Integral square root when `x` is a perfect square.
fn split_sqrt(x: &BigInt) -> Option<BigInt> {
    let s = x.sqrt();
    (&s * &s == *x).then_some(s)
}

/// `c * 2^(e2) * |a|^(ea) * |v|^(ev)` as a single radical; `|a|`, `|v|` enter through their squares.
fn scaled_factor(coeff: Rational, e2: Rational, a_sq: &BigInt, ea: Rational, v_sq: Option<&BigInt>) -> Result<RadicalTerm> {
    let mut factors = vec![(r2(2, 1), e2), (rat_int(a_sq), ea / r2(2, 1))];
    if let Some(v_sq) = v_sq {
        factors.push((rat_int(v_sq), r2(1, 2)));
    }
    RadicalTerm::from_powers(coeff, &factors)
}

/// `floor(f(a) (2 |v| + beta2 - beta1)) + 1` with `f(a) = 2^(n/4) / |a|^(1/n)`.
pub fn width_bound_range(a: &[BigInt], v: &[BigInt], beta1: &BigInt, beta2: &BigInt) -> Result<BigInt> {
    let n = a.len() as i64;
    let a_sq = norm_sq_int(a);
    let v_sq = norm_sq_int(v);
    let delta = rat_int(&(beta2 - beta1));
    let e2 = r2(n, 4);
    let ea = r2(-1, n);
    let mut e = RadicalExpr::zero();
    match split_sqrt(&v_sq) {
        Some(vn) => {
            let coeff = rat_int(&(vn * 2)) + delta;
            if !coeff.is_zero() {
                e = e.plus(scaled_factor(coeff, e2, &a_sq, ea, None)?);
            }
        }
        None => {
            e = e.plus(scaled_factor(r2(2, 1), e2.clone(), &a_sq, ea.clone(), Some(&v_sq))?);
            if !delta.is_zero() {
                e = e.plus(scaled_factor(delta, e2, &a_sq, ea, None)?);
            }
        }
    }
    Ok(e.floor()? + 1)
}

/// `floor(2 g(a) |v|) + 1` with `g(a) = 2^((n-2)/4) / |a|^(1/(n-1))`.
pub fn width_bound_null(a: &[BigInt], v: &[BigInt]) -> Result<BigInt> {
    let n = a.len() as i64;
    if n < 2 {
        return Err(Error::Dimension("nullspace bound needs n >= 2".into()));
    }
    let v_sq = norm_sq_int(v);
    if v_sq.is_zero() {
        return Ok(BigInt::one());
    }
    let t = scaled_factor(r2(2, 1), r2(n - 2, 4), &norm_sq_int(a), r2(-1, n - 1), Some(&v_sq))?;
    Ok(RadicalExpr::from_terms(vec![t]).floor()? + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferenceCheck {
    /// `p U = +-e_n` (range) or `p V = +-e_{n-1}` (null).
    pub unit: bool,
    pub original: BigInt,
    pub reformed: BigInt,
}

impl TransferenceCheck {
    pub fn holds(&self) -> bool {
        self.unit && self.original == self.reformed
    }
}

/// `x = +-e_i`.
pub fn is_signed_unit(x: &[BigInt], i: usize) -> bool {
    x.iter().enumerate().all(|(j, xj)| if j == i { xj.abs().is_one() } else { xj.is_zero() })
}

/// Compares `iwidth(p, Q)` with `iwidth(e_n, Q~)` for the rangespace direction `p`.
pub fn transference_range(inst: &KnapsackInstance, reform: &RangespaceReform, p: &[BigInt]) -> Result<TransferenceCheck> {
    let n = inst.n();
    let pu = reform.u.vec_mul(p)?;
    let original = iwidth(p, &Polytope::knapsack(inst))?;
    let reformed = iwidth(&unit_vec(n, n - 1), &Polytope::rangespace(reform)?)?;
    Ok(TransferenceCheck { unit: is_signed_unit(&pu, n - 1), original, reformed })
}

/// Compares `iwidth(p, Q)` with `iwidth(e_{n-1}, Q^)` for the nullspace direction `p`.
pub fn transference_null(reform: &NullspaceReform, p: &[BigInt]) -> Result<TransferenceCheck> {
    let inst = &reform.instance;
    let n = inst.n();
    let pv = reform.v_basis.vec_mul(p)?;
    let original = iwidth(p, &Polytope::knapsack(inst))?;
    let reformed = iwidth(&unit_vec(n - 1, n - 2), &Polytope::nullspace(reform)?)?;
    Ok(TransferenceCheck { unit: is_signed_unit(&pv, n - 2), original, reformed })
}
