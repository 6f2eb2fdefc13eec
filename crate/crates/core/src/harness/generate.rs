use num_bigint::{BigInt, RandBigInt};
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{dot_int, gcd_vec, rat_string, Rational};
use crate::reform::{check_hypothesis, density_below, KnapsackInstance};

use super::document::{InstanceDocument, Provenance};

const MAX_ATTEMPTS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// `a_i` uniform on `1..=M`.
    BigM(BigInt),
    /// `M = ceil(2^(n/d))`, and the draw is kept only if its density is below `5d/4`.
    Density(Rational),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaMode {
    /// `beta1 <= beta2` drawn uniformly from `[0, a v]`.
    #[default]
    Range,
    /// `beta1 = beta2` drawn uniformly from `[0, a v]`.
    Equal,
    /// `beta1 = beta2 = a x` for a uniform box point `x`.
    Feasible,
}

impl BetaMode {
    pub fn name(self) -> &'static str {
        match self {
            BetaMode::Range => "range",
            BetaMode::Equal => "equal",
            BetaMode::Feasible => "feasible",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub n: usize,
    pub mode: WeightMode,
    pub vmax: BigInt,
    pub beta: BetaMode,
    pub require_hypothesis: bool,
    pub seed: u64,
    /// Independent ChaCha stream, so batch cells do not share draws.
    pub stream: u64,
}

/// Smallest `M` with `M >= 2^(n/d)`.
pub fn density_big_m(n: usize, d: &Rational) -> Result<BigInt> {
    if !d.is_positive() {
        return Err(Error::Invalid(format!("density must be positive, got {d}")));
    }
    let p: u32 = d.numer().try_into().map_err(|_| Error::Invalid("density numerator too large".into()))?;
    let q: usize = d.denom().try_into().map_err(|_| Error::Invalid("density denominator too large".into()))?;
    // M^p >= 2^(n q)
    let target = BigInt::one() << (n * q);
    let r = target.nth_root(p);
    Ok(if num_traits::pow(r.clone(), p as usize) == target { r } else { r + 1 })
}

impl GeneratorConfig {
    pub fn big_m(&self) -> Result<BigInt> {
        match &self.mode {
            WeightMode::BigM(m) => Ok(m.clone()),
            WeightMode::Density(d) => density_big_m(self.n, d),
        }
    }

    fn validate(&self, m: &BigInt) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Invalid("n must be positive".into()));
        }
        if !m.is_positive() {
            return Err(Error::Invalid(format!("M must be positive, got {m}")));
        }
        if !self.vmax.is_positive() {
            return Err(Error::Invalid(format!("vmax must be positive, got {}", self.vmax)));
        }
        if self.require_hypothesis {
            let best = m * m * BigInt::from(self.n);
            if best < (BigInt::one() << ((self.n + 2) * self.n)) {
                return Err(Error::Invalid(format!("M = {m} is too small for |a|^2 >= 2^((n+2)n) at n = {}", self.n)));
            }
        }
        Ok(())
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: &BigInt, hi: &BigInt) -> BigInt {
    rng.gen_bigint_range(lo, &(hi + 1))
}

/// Deterministic stream of instances for the given configuration.
pub fn generate(config: &GeneratorConfig, count: usize) -> Result<Vec<InstanceDocument>> {
    let m = config.big_m()?;
    config.validate(&m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(config.stream);
    let one = BigInt::one();
    let zero = BigInt::zero();
    let density_cap = match &config.mode {
        WeightMode::Density(d) => Some(d * Rational::new(5.into(), 4.into())),
        WeightMode::BigM(_) => None,
    };
    let mut out = Vec::with_capacity(count);
    for index in 0..count {
        let mut regenerations = 0u64;
        let a = loop {
            if regenerations >= MAX_ATTEMPTS {
                return Err(Error::Invalid(format!("no acceptable weight vector after {MAX_ATTEMPTS} draws")));
            }
            let a: Vec<BigInt> = (0..config.n).map(|_| uniform(&mut rng, &one, &m)).collect();
            let ok = gcd_vec(&a).is_one()
                && (!config.require_hypothesis || check_hypothesis(&a))
                && density_cap.as_ref().is_none_or(|t| density_below(&a, t));
            if ok {
                break a;
            }
            regenerations += 1;
        };
        let v: Vec<BigInt> = (0..config.n).map(|_| uniform(&mut rng, &one, &config.vmax)).collect();
        let av = dot_int(&a, &v);
        let (beta1, beta2) = match config.beta {
            BetaMode::Range => {
                let x = uniform(&mut rng, &zero, &av);
                let y = uniform(&mut rng, &zero, &av);
                if x <= y { (x, y) } else { (y, x) }
            }
            BetaMode::Equal => {
                let b = uniform(&mut rng, &zero, &av);
                (b.clone(), b)
            }
            BetaMode::Feasible => {
                let x: Vec<BigInt> = v.iter().map(|vi| uniform(&mut rng, &zero, vi)).collect();
                let b = dot_int(&a, &x);
                (b.clone(), b)
            }
        };
        let inst = KnapsackInstance::new(a, v, beta1, beta2)?;
        let provenance = Provenance {
            seed: config.seed,
            stream: config.stream,
            index: index as u64,
            mode: match config.mode {
                WeightMode::BigM(_) => "bigM".into(),
                WeightMode::Density(_) => "density".into(),
            },
            big_m: m.to_string(),
            density: match &config.mode {
                WeightMode::Density(d) => Some(rat_string(d)),
                WeightMode::BigM(_) => None,
            },
            vmax: config.vmax.to_string(),
            beta: config.beta.name().into(),
            regenerations,
        };
        out.push(InstanceDocument::from_instance(&inst, Some(provenance)));
    }
    Ok(out)
}
