use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reform::KnapsackInstance;

pub const SCHEMA_VERSION: u32 = 1;

/// Generator settings recorded next to a generated instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream: u64,
    pub index: u64,
    /// `"bigM"` or `"density"`.
    pub mode: String,
    pub big_m: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
    pub vmax: String,
    pub beta: String,
    pub regenerations: u64,
}

/// On-disk form of a knapsack instance. Integers are decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub schema_version: u32,
    pub n: usize,
    pub a: Vec<String>,
    pub v: Vec<String>,
    pub beta1: String,
    pub beta2: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn parse_int(field: &str, s: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidInstance(format!("{field}: {s:?} is not a decimal integer")))
}

fn parse_ints(field: &str, xs: &[String]) -> Result<Vec<BigInt>> {
    xs.iter().enumerate().map(|(i, s)| parse_int(&format!("{field}[{i}]"), s)).collect()
}

fn strings(xs: &[BigInt]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

impl InstanceDocument {
    pub fn from_instance(inst: &KnapsackInstance, provenance: Option<Provenance>) -> Self {
        InstanceDocument {
            schema_version: SCHEMA_VERSION,
            n: inst.n(),
            a: strings(inst.a()),
            v: strings(inst.v()),
            beta1: inst.beta1().to_string(),
            beta2: inst.beta2().to_string(),
            provenance,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDocument =
            serde_json::from_str(text).map_err(|e| Error::InvalidInstance(format!("malformed instance document: {e}")))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidInstance(format!("unsupported schema version {}", doc.schema_version)));
        }
        Ok(doc)
    }

    /// Pretty JSON with a trailing newline; parsing and re-serializing is byte-stable.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance documents always serialize");
        s.push('\n');
        s
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("instance documents always serialize")
    }

    fn parts(&self) -> Result<(Vec<BigInt>, Vec<BigInt>, BigInt, BigInt)> {
        if self.a.len() != self.n || self.v.len() != self.n {
            return Err(Error::InvalidInstance(format!(
                "n = {} but a has {} and v has {} entries",
                self.n,
                self.a.len(),
                self.v.len()
            )));
        }
        Ok((parse_ints("a", &self.a)?, parse_ints("v", &self.v)?, parse_int("beta1", &self.beta1)?, parse_int("beta2", &self.beta2)?))
    }

    /// Validates without touching the weights.
    pub fn to_instance(&self) -> Result<KnapsackInstance> {
        let (a, v, b1, b2) = self.parts()?;
        KnapsackInstance::new(a, v, b1, b2)
    }

    /// Divides out `gcd(a)` first; returns the divisor.
    pub fn to_normalized_instance(&self) -> Result<(KnapsackInstance, BigInt)> {
        let (a, v, b1, b2) = self.parts()?;
        KnapsackInstance::normalized(a, v, b1, b2)
    }
}
