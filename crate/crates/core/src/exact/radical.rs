//! Sums of real radicals `c * x^(1/q)` with certified comparisons and floors.
//!
//! A single radical against a rational is always decided exactly by cross
//! powering. Sums with two or more irrational terms are enclosed in rational
//! intervals whose width halves with every doubling of the working precision.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const START_BITS: u64 = 64;
const MAX_BITS: u64 = 1 << 16;

/// Exact order of `x^(1/p)` against `y^(1/q)`, decided as `x^q` against `y^p`.
pub fn cmp_roots(x: &BigRational, p: u32, y: &BigRational, q: u32) -> Ordering {
    assert!(x.is_positive() && y.is_positive(), "cmp_roots needs positive operands");
    assert!(p > 0 && q > 0, "cmp_roots needs positive root indices");
    num_traits::pow(x.clone(), q as usize).cmp(&num_traits::pow(y.clone(), p as usize))
}

/// Exact floor of a radical expression.
pub fn floor_radical(e: &RadicalExpr) -> Result<BigInt> {
    e.floor()
}

fn ipow(b: &BigInt, e: u32) -> BigInt {
    num_traits::pow(b.clone(), e as usize)
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    let r = n.nth_root(q);
    (ipow(&r, q) == *n).then_some(r)
}

/// `coeff * base^(1/root)` with `base >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalTerm {
    pub coeff: BigRational,
    pub base: BigRational,
    pub root: u32,
}

impl RadicalTerm {
    pub fn new(coeff: BigRational, base: BigRational, root: u32) -> Result<Self> {
        if base.is_negative() {
            return Err(Error::Invalid("radical of a negative base".into()));
        }
        if root == 0 {
            return Err(Error::Invalid("zeroth root".into()));
        }
        Ok(RadicalTerm { coeff, base, root })
    }

    /// `coeff * prod(base_i ^ exp_i)` for positive bases and rational exponents,
    /// folded into a single radical whose index is the lcm of the exponent denominators.
    pub fn from_powers(coeff: BigRational, factors: &[(BigRational, BigRational)]) -> Result<Self> {
        let root = factors.iter().fold(BigInt::one(), |l, (_, e)| l.lcm(e.denom()));
        let root = root.to_u32().ok_or_else(|| Error::Invalid("root index too large".into()))?;
        let mut base = BigRational::one();
        for (b, e) in factors {
            if !b.is_positive() {
                return Err(Error::Invalid("power of a non-positive base".into()));
            }
            let k = (e * BigRational::from_integer(BigInt::from(root))).to_integer();
            let k = k.to_i64().ok_or_else(|| Error::Invalid("exponent too large".into()))?;
            let p = num_traits::pow(b.clone(), k.unsigned_abs() as usize);
            base *= if k < 0 { p.recip() } else { p };
        }
        RadicalTerm::new(coeff, base, root)
    }

    /// The value when the radical resolves to a rational.
    pub fn exact_value(&self) -> Option<BigRational> {
        if self.coeff.is_zero() || self.base.is_zero() {
            return Some(BigRational::zero());
        }
        let n = exact_root(self.base.numer(), self.root)?;
        let d = exact_root(self.base.denom(), self.root)?;
        Some(&self.coeff * BigRational::new(n, d))
    }

    /// Rational interval containing the value, of relative width about `2^-bits`.
    pub fn enclose(&self, bits: u64) -> (BigRational, BigRational) {
        if let Some(v) = self.exact_value() {
            return (v.clone(), v);
        }
        let q = self.root;
        let shift = bits as usize * q as usize;
        let n = self.base.numer() << shift;
        let d = self.base.denom() << shift;
        let (nl, dl) = (n.nth_root(q), d.nth_root(q));
        let nh = if ipow(&nl, q) == n { nl.clone() } else { &nl + 1 };
        let dh = if ipow(&dl, q) == d { dl.clone() } else { &dl + 1 };
        let lo = BigRational::new(nl, dh);
        let hi = BigRational::new(nh, dl);
        if self.coeff.is_negative() {
            (&self.coeff * hi, &self.coeff * lo)
        } else {
            (&self.coeff * lo, &self.coeff * hi)
        }
    }

    /// Exact order of this (irrational or not) term against a rational.
    pub fn cmp_rational(&self, k: &BigRational) -> Ordering {
        if let Some(v) = self.exact_value() {
            return v.cmp(k);
        }
        // coeff != 0 and base > 0 here
        let y = k / &self.coeff;
        let ord = if y.is_negative() || y.is_zero() {
            Ordering::Greater
        } else {
            self.base.cmp(&num_traits::pow(y, self.root as usize))
        };
        if self.coeff.is_negative() {
            ord.reverse()
        } else {
            ord
        }
    }
}

/// A finite sum of [`RadicalTerm`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RadicalExpr {
    pub terms: Vec<RadicalTerm>,
}

impl RadicalExpr {
    pub fn zero() -> Self {
        RadicalExpr::default()
    }

    pub fn rational(q: BigRational) -> Self {
        RadicalExpr { terms: vec![RadicalTerm { coeff: q, base: BigRational::one(), root: 1 }] }
    }

    /// `coeff * sqrt(x)`.
    pub fn sqrt(coeff: BigRational, x: BigRational) -> Result<Self> {
        Ok(RadicalExpr { terms: vec![RadicalTerm::new(coeff, x, 2)?] })
    }

    pub fn from_terms(terms: Vec<RadicalTerm>) -> Self {
        RadicalExpr { terms }
    }

    pub fn plus(mut self, t: RadicalTerm) -> Self {
        self.terms.push(t);
        self
    }

    pub fn plus_rational(self, q: BigRational) -> Self {
        self.plus(RadicalTerm { coeff: q, base: BigRational::one(), root: 1 })
    }

    fn split(&self) -> (BigRational, Vec<&RadicalTerm>) {
        let mut c = BigRational::zero();
        let mut irr = Vec::new();
        for t in &self.terms {
            match t.exact_value() {
                Some(v) => c += v,
                None => irr.push(t),
            }
        }
        (c, irr)
    }

    pub fn enclose(&self, bits: u64) -> (BigRational, BigRational) {
        self.terms.iter().fold((BigRational::zero(), BigRational::zero()), |(lo, hi), t| {
            let (l, h) = t.enclose(bits);
            (lo + l, hi + h)
        })
    }

    /// The value, if every term resolves rationally.
    pub fn exact_value(&self) -> Option<BigRational> {
        let (c, irr) = self.split();
        irr.is_empty().then_some(c)
    }

    /// Certified order against a rational.
    pub fn cmp_rational(&self, k: &BigRational) -> Result<Ordering> {
        let (c, irr) = self.split();
        match irr.as_slice() {
            [] => Ok(c.cmp(k)),
            [t] => Ok(t.cmp_rational(&(k - c))),
            _ => {
                let mut bits = START_BITS;
                while bits <= MAX_BITS {
                    let (lo, hi) = self.enclose(bits);
                    if lo > *k {
                        return Ok(Ordering::Greater);
                    }
                    if hi < *k {
                        return Ok(Ordering::Less);
                    }
                    bits *= 2;
                }
                Err(Error::RadicalUnresolved { bits: MAX_BITS })
            }
        }
    }

    /// Certified floor.
    pub fn floor(&self) -> Result<BigInt> {
        let (c, irr) = self.split();
        match irr.as_slice() {
            [] => Ok(c.floor().to_integer()),
            [_] => {
                let (lo, _) = self.enclose(START_BITS);
                let mut k = lo.floor().to_integer();
                while self.cmp_rational(&BigRational::from_integer(&k + 1))? != Ordering::Less {
                    k += 1;
                }
                while self.cmp_rational(&BigRational::from_integer(k.clone()))? == Ordering::Less {
                    k -= 1;
                }
                Ok(k)
            }
            _ => {
                let mut bits = START_BITS;
                while bits <= MAX_BITS {
                    let (lo, hi) = self.enclose(bits);
                    let (fl, fh) = (lo.floor(), hi.floor());
                    if fl == fh {
                        return Ok(fl.to_integer());
                    }
                    bits *= 2;
                }
                Err(Error::RadicalUnresolved { bits: MAX_BITS })
            }
        }
    }

    /// Floating value for display only.
    pub fn approx_f64(&self) -> f64 {
        let (lo, hi) = self.enclose(START_BITS);
        ((lo + hi) / BigRational::from_integer(BigInt::from(2))).to_f64().unwrap_or(f64::NAN)
    }
}
