//! Exact statistics of a partition: count, product and power sums.
//!
//! Values are `u128` with checked arithmetic. Anything that does not fit is
//! reported as [`Error::Overflow`]; nothing wraps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// A statistic wizard A may disclose.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StatDescriptor {
    /// Number of children.
    Count,
    /// Product of the ages: the wizard's age.
    Product,
    /// Sum of k-th powers. `PowerSum(1)` is the bus number and
    /// `PowerSum(2)` the number of dolls.
    PowerSum(u32),
}

impl StatDescriptor {
    pub fn evaluate_parts(self, parts: &[u32]) -> Result<u128> {
        let overflow = || Error::Overflow {
            stat: self.to_string(),
            parts: parts.to_vec(),
        };
        match self {
            StatDescriptor::Count => Ok(parts.len() as u128),
            StatDescriptor::Product => parts
                .iter()
                .try_fold(1u128, |acc, &p| acc.checked_mul(u128::from(p)))
                .ok_or_else(overflow),
            StatDescriptor::PowerSum(k) => parts
                .iter()
                .try_fold(0u128, |acc, &p| {
                    u128::from(p)
                        .checked_pow(k)
                        .and_then(|v| acc.checked_add(v))
                })
                .ok_or_else(overflow),
        }
    }

    /// How the statistic moves when a part equal to 1 is added.
    pub fn shift_under_append_one(self, value: u128) -> u128 {
        match self {
            StatDescriptor::Product => value,
            StatDescriptor::Count | StatDescriptor::PowerSum(_) => value + 1,
        }
    }

    /// Short human name used in text reports.
    pub fn noun(self) -> String {
        match self {
            StatDescriptor::Count => "number of children".into(),
            StatDescriptor::Product => "age".into(),
            StatDescriptor::PowerSum(1) => "bus number".into(),
            StatDescriptor::PowerSum(2) => "number of dolls".into(),
            StatDescriptor::PowerSum(3) => "sum of cubes".into(),
            StatDescriptor::PowerSum(k) => format!("sum of {k}-th powers"),
        }
    }
}

impl fmt::Display for StatDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatDescriptor::Count => f.write_str("count"),
            StatDescriptor::Product => f.write_str("product"),
            StatDescriptor::PowerSum(k) => write!(f, "power_sum:{k}"),
        }
    }
}

impl FromStr for StatDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "count" => Ok(StatDescriptor::Count),
            "product" => Ok(StatDescriptor::Product),
            _ => s
                .strip_prefix("power_sum:")
                .and_then(|k| k.parse::<u32>().ok())
                .filter(|&k| k >= 1)
                .map(StatDescriptor::PowerSum)
                .ok_or_else(|| Error::InvalidDescriptor(s.to_string())),
        }
    }
}

impl Serialize for StatDescriptor {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StatDescriptor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact statistic values, one per descriptor of a key, in key order.
/// Serialized as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KeyValue(pub Vec<u128>);

impl KeyValue {
    pub fn values(&self) -> &[u128] {
        &self.0
    }

    pub fn get(&self, index: usize) -> u128 {
        self.0[index]
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(u128::to_string).collect()
    }

    pub fn from_strings<S: AsRef<str>>(values: &[S]) -> Result<Self> {
        values
            .iter()
            .map(|s| {
                let s = s.as_ref();
                s.parse::<u128>()
                    .map_err(|_| Error::MalformedRecord(format!("`{s}` is not a decimal integer")))
            })
            .collect::<Result<Vec<_>>>()
            .map(KeyValue)
    }
}

impl fmt::Display for KeyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for KeyValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.to_strings())
    }
}

impl<'de> Deserialize<'de> for KeyValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        KeyValue::from_strings(&raw).map_err(serde::de::Error::custom)
    }
}

/// Evaluates `descriptors` on `p`, in order.
pub fn evaluate(p: &Partition, descriptors: &[StatDescriptor]) -> Result<KeyValue> {
    evaluate_parts(p.parts(), descriptors)
}

pub(crate) fn evaluate_parts(parts: &[u32], descriptors: &[StatDescriptor]) -> Result<KeyValue> {
    if descriptors.is_empty() {
        return Err(Error::InvalidVariant("descriptor list is empty".into()));
    }
    descriptors
        .iter()
        .map(|d| d.evaluate_parts(parts))
        .collect::<Result<Vec<_>>>()
        .map(KeyValue)
}
