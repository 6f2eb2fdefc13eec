//! Knapsack instances and their rangespace / nullspace reformulations.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{dot_int, gcd_vec, max_abs, norm_sq_int, IntMat, IntVec, Rational};
use crate::lattice::{coeff_vector, lll_reduce, nearest_plane, nullspace_basis, stacked, ReductionResult};

/// `beta1 <= a x <= beta2, 0 <= x <= v, x integral`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnapsackInstance {
    a: IntVec,
    v: IntVec,
    beta1: BigInt,
    beta2: BigInt,
}

impl KnapsackInstance {
    /// Validates positivity, coprimality and `0 <= beta1 <= beta2 <= a v`.
    pub fn new(a: IntVec, v: IntVec, beta1: BigInt, beta2: BigInt) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInstance("empty weight vector".into()));
        }
        if a.len() != v.len() {
            return Err(Error::InvalidInstance(format!("{} weights but {} upper bounds", a.len(), v.len())));
        }
        if let Some(i) = a.iter().position(|x| !x.is_positive()) {
            return Err(Error::InvalidInstance(format!("weight a[{i}] = {} is not positive", a[i])));
        }
        if let Some(i) = v.iter().position(|x| x.is_negative()) {
            return Err(Error::InvalidInstance(format!("upper bound v[{i}] = {} is negative", v[i])));
        }
        let g = gcd_vec(&a);
        if !g.is_one() {
            return Err(Error::NotCoprime { gcd: g.to_string() });
        }
        let av = dot_int(&a, &v);
        if beta1.is_negative() || beta1 > beta2 || beta2 > av {
            return Err(Error::InvalidInstance(format!(
                "need 0 <= beta1 <= beta2 <= a.v, got beta1 = {beta1}, beta2 = {beta2}, a.v = {av}"
            )));
        }
        Ok(KnapsackInstance { a, v, beta1, beta2 })
    }

    /// Divides `a` by its gcd `g`; both bounds must be multiples of `g`.
    pub fn normalized(a: IntVec, v: IntVec, beta1: BigInt, beta2: BigInt) -> Result<(Self, BigInt)> {
        let g = gcd_vec(&a);
        if g.is_zero() || g.is_one() {
            return Ok((KnapsackInstance::new(a, v, beta1, beta2)?, BigInt::one()));
        }
        for beta in [&beta1, &beta2] {
            if !beta.is_multiple_of(&g) {
                return Err(Error::Divisibility { target: beta.to_string(), gcd: g.to_string() });
            }
        }
        let a = a.iter().map(|x| x / &g).collect();
        Ok((KnapsackInstance::new(a, v, beta1 / &g, beta2 / &g)?, g))
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[BigInt] {
        &self.a
    }

    pub fn v(&self) -> &[BigInt] {
        &self.v
    }

    pub fn beta1(&self) -> &BigInt {
        &self.beta1
    }

    pub fn beta2(&self) -> &BigInt {
        &self.beta2
    }

    pub fn is_equality(&self) -> bool {
        self.beta1 == self.beta2
    }

    pub fn a_norm_sq(&self) -> BigInt {
        norm_sq_int(&self.a)
    }

    pub fn v_norm_sq(&self) -> BigInt {
        norm_sq_int(&self.v)
    }

    /// Integral `x` in the box satisfying the knapsack row.
    pub fn is_feasible(&self, x: &[BigInt]) -> bool {
        let ax = dot_int(&self.a, x);
        x.iter().zip(&self.v).all(|(xi, vi)| !xi.is_negative() && xi <= vi) && ax >= self.beta1 && ax <= self.beta2
    }
}

/// `beta1 <= (a U) y <= beta2, 0 <= U y <= v`, where `[a; I] U` is LLL-reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangespaceReform {
    pub instance: KnapsackInstance,
    pub reduction: ReductionResult,
    pub u: IntMat,
    pub u_inv: IntMat,
    pub au: IntVec,
}

pub fn build_rangespace(inst: &KnapsackInstance) -> Result<RangespaceReform> {
    let reduction = lll_reduce(&stacked(inst.a()))?;
    let u = reduction.transform.clone();
    let u_inv = reduction.inverse.clone();
    let au = reduction.reduced.row(0).to_vec();
    Ok(RangespaceReform { instance: inst.clone(), reduction, u, u_inv, au })
}

/// `-x_beta <= V lambda <= v - x_beta` with `V` an LLL-reduced basis of `{x : a x = 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullspaceReform {
    pub instance: KnapsackInstance,
    pub v_basis: IntMat,
    pub x_beta: IntVec,
    /// Integral with `a b = 1`.
    pub b: IntVec,
}

impl NullspaceReform {
    pub fn beta(&self) -> &BigInt {
        self.instance.beta1()
    }
}

pub fn build_nullspace(inst: &KnapsackInstance) -> Result<NullspaceReform> {
    if !inst.is_equality() {
        return Err(Error::NullspaceNeedsEquality);
    }
    if inst.n() < 2 {
        return Err(Error::InvalidInstance("nullspace reformulation needs n >= 2".into()));
    }
    let v_basis = lll_reduce(&nullspace_basis(inst.a())?)?.reduced;
    let b = nearest_plane(&coeff_vector(inst.a(), &BigInt::one())?, &v_basis)?;
    let raw = coeff_vector(inst.a(), inst.beta1())?;
    let x_beta = nearest_plane(&raw, &v_basis)?;
    Ok(NullspaceReform { instance: inst.clone(), v_basis, x_beta, b })
}

/// `d(a) = n / log2 |a|_inf < t`, decided as `|a|_inf^p > 2^(n q)` for `t = p/q`.
pub fn density_below(a: &[BigInt], t: &Rational) -> bool {
    if !t.is_positive() {
        return false;
    }
    let m = max_abs(a);
    if m <= BigInt::one() {
        return false;
    }
    let p = t.numer().clone();
    let q = t.denom().clone();
    let p: usize = p.try_into().expect("density threshold numerator too large");
    let q: usize = q.try_into().expect("density threshold denominator too large");
    num_traits::pow(m, p) > (BigInt::one() << (a.len() * q))
}

/// Floating density for display; infinite when `|a|_inf <= 1`.
pub fn density_f64(a: &[BigInt]) -> f64 {
    let m = max_abs(a);
    let bits = m.bits() as f64;
    // log2 of m from its leading 64 bits
    let shift = m.bits().saturating_sub(64);
    let lead: u64 = (&m >> shift).try_into().unwrap_or(u64::MAX);
    let log2 = (lead as f64).log2() + shift as f64;
    let log2 = if log2.is_finite() { log2 } else { bits };
    a.len() as f64 / log2
}

pub fn density_approx(a: &[BigInt]) -> String {
    crate::exact::decimal::format_f64(density_f64(a))
}

/// `|a| >= 2^((n/2 + 1) n)`, decided as `|a|^2 >= 2^((n+2) n)`.
pub fn check_hypothesis(a: &[BigInt]) -> bool {
    let n = a.len();
    norm_sq_int(a) >= (BigInt::one() << ((n + 2) * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, int_vec, rat};
    use crate::lattice::{completeness_certificate, is_lll_reduced};

    pub const EXAMPLE: [i64; 5] = [3488, 451, 1231, 6415, 2191];

    fn inst(a: &[i64], v: &[i64], b1: i64, b2: i64) -> KnapsackInstance {
        KnapsackInstance::new(int_vec(a), int_vec(v), int(b1), int(b2)).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(matches!(KnapsackInstance::new(int_vec(&[2, 4]), int_vec(&[1, 1]), int(0), int(2)), Err(Error::NotCoprime { .. })));
        assert!(KnapsackInstance::new(int_vec(&[2, 3]), int_vec(&[1, 1]), int(3), int(2)).is_err());
        assert!(KnapsackInstance::new(int_vec(&[2, 3]), int_vec(&[1, 1]), int(0), int(6)).is_err());
        assert!(KnapsackInstance::new(int_vec(&[0, 3]), int_vec(&[1, 1]), int(0), int(1)).is_err());
        assert!(KnapsackInstance::new(int_vec(&[2, 3]), int_vec(&[1]), int(0), int(1)).is_err());
        let (i, g) = KnapsackInstance::normalized(int_vec(&[4, 6]), int_vec(&[1, 1]), int(4), int(10)).unwrap();
        assert_eq!(g, int(2));
        assert_eq!(i.a(), &int_vec(&[2, 3])[..]);
        assert_eq!(i.beta2(), &int(5));
        assert!(KnapsackInstance::normalized(int_vec(&[4, 6]), int_vec(&[1, 1]), int(3), int(10)).is_err());
    }

    #[test]
    fn trivial_rangespace() {
        let r = build_rangespace(&inst(&[1], &[3], 0, 2)).unwrap();
        assert_eq!(r.u.rows(), 1);
        assert!(r.u[(0, 0)].abs().is_one());
    }

    #[test]
    fn example_rangespace_reduced() {
        let r = build_rangespace(&inst(&EXAMPLE, &[1; 5], 0, 100)).unwrap();
        assert!(is_lll_reduced(&stacked(r.instance.a()).mul(&r.u).unwrap()).unwrap());
        assert_eq!(r.u.mul(&r.u_inv).unwrap(), crate::exact::Matrix::identity(5));
        assert_eq!(r.au, r.u.vec_mul(r.instance.a()).unwrap());
    }

    #[test]
    fn nullspace_requires_equality() {
        assert_eq!(build_nullspace(&inst(&[2, 3], &[1, 1], 0, 5)), Err(Error::NullspaceNeedsEquality));
    }

    #[test]
    fn nullspace_postconditions() {
        let beta = 3488 + 451 + 2191;
        let r = build_nullspace(&inst(&EXAMPLE, &[1; 5], beta, beta)).unwrap();
        let a = r.instance.a();
        assert!(r.v_basis.vec_mul(a).unwrap().iter().all(Zero::is_zero));
        assert_eq!(dot_int(a, &r.x_beta), int(beta));
        assert_eq!(dot_int(a, &r.b), int(1));
        assert!(is_lll_reduced(&r.v_basis).unwrap());
        assert!(completeness_certificate(&r.v_basis).unwrap().ok());
        let z = build_nullspace(&inst(&[2, 3], &[1, 1], 0, 0)).unwrap();
        assert!(z.x_beta.iter().all(Zero::is_zero));
    }

    #[test]
    fn density_decisions() {
        assert!(!density_below(&int_vec(&[2, 2]), &rat(2, 1)));
        assert!(density_below(&int_vec(&[2, 3]), &rat(2, 1)));
        let d = density_f64(&int_vec(&EXAMPLE));
        assert!((d - 5.0 / 6415f64.log2()).abs() < 1e-12);
        assert_eq!(density_approx(&int_vec(&EXAMPLE)), "0.395343");
    }

    #[test]
    fn density_matches_power_form() {
        // d(a) < c/n  <=>  2^(n^2/c) < |a|_inf, checked with c = 3/2 (n^2/c integral for n = 3)
        let c = rat(3, 2);
        for m in [40i64, 63, 64, 65, 500] {
            let a = int_vec(&[m, 5, 7]);
            let n = 3usize;
            let lhs = density_below(&a, &(c.clone() / rat(n as i64, 1)));
            let rhs = BigInt::from(m) > (BigInt::one() << 6);
            assert_eq!(lhs, rhs, "m = {m}");
        }
    }

    #[test]
    fn hypothesis_decisions() {
        assert!(check_hypothesis(&int_vec(&[256, 1])));
        assert!(!check_hypothesis(&int_vec(&EXAMPLE)));
        for n in 1..=6usize {
            let mut a = vec![BigInt::one() << ((n + 2) * n / 2); 1];
            a.extend(std::iter::repeat_n(BigInt::zero(), n - 1));
            if (n + 2) * n % 2 == 0 {
                assert!(check_hypothesis(&a));
            }
            let mut below = a.clone();
            below[0] -= 1;
            assert!(!check_hypothesis(&below));
        }
    }
}
