//! Integer partitions of a bus number.
//!
//! A [`Partition`] is kept in canonical form: parts sorted in nondecreasing
//! order. [`Partitions`] streams every partition of a sum that satisfies a set
//! of [`PartitionConstraints`], in lexicographic order of the canonical part
//! sequences, without materializing the whole list.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multiset of positive integers (the children's ages), stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a canonical partition from parts in any order.
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidConstraints(
                "a partition needs at least one part".into(),
            ));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidConstraints(
                "partition parts must be positive".into(),
            ));
        }
        parts.sort_unstable();
        Ok(Partition(parts))
    }

    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(!parts.is_empty());
        debug_assert!(parts.windows(2).all(|w| w[0] <= w[1]));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Number of parts.
    pub fn count(&self) -> usize {
        self.0.len()
    }

    /// Sum of the parts, i.e. the bus number.
    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&p| u64::from(p)).sum()
    }

    pub fn largest(&self) -> u32 {
        *self.0.last().expect("partitions are nonempty")
    }

    /// The partition with one extra part equal to 1. Sum and count grow by
    /// one, the product is unchanged and every power sum grows by one.
    pub fn append_one(&self) -> Partition {
        let mut parts = Vec::with_capacity(self.0.len() + 1);
        parts.push(1);
        parts.extend_from_slice(&self.0);
        Partition(parts)
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

/// Comma-separated parts, nondecreasing: `1,3,4,4`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, part) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{part}")?;
        }
        Ok(())
    }
}

/// Restrictions on which partitions of `sum` are admissible.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionConstraints {
    pub sum: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_part: Option<u32>,
}

impl PartitionConstraints {
    pub fn new(sum: u32) -> Self {
        PartitionConstraints {
            sum,
            ..Default::default()
        }
    }

    pub fn with_count(mut self, min: Option<u32>, max: Option<u32>) -> Self {
        self.min_count = min;
        self.max_count = max;
        self
    }

    pub fn with_max_part(mut self, max_part: u32) -> Self {
        self.max_part = Some(max_part);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sum == 0 {
            return Err(Error::InvalidConstraints("sum must be at least 1".into()));
        }
        validate_count_bounds(self.min_count, self.max_count)?;
        if self.max_part == Some(0) {
            return Err(Error::InvalidConstraints(
                "max_part must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Post-filter semantics: does `p` satisfy every constraint?
    pub fn admits(&self, p: &Partition) -> bool {
        let count = p.count() as u64;
        p.sum() == u64::from(self.sum)
            && self.min_count.is_none_or(|m| count >= u64::from(m))
            && self.max_count.is_none_or(|m| count <= u64::from(m))
            && self.max_part.is_none_or(|m| p.largest() <= m)
    }
}

pub(crate) fn validate_count_bounds(min: Option<u32>, max: Option<u32>) -> Result<()> {
    if min == Some(0) || max == Some(0) {
        return Err(Error::InvalidConstraints(
            "count bounds must be at least 1".into(),
        ));
    }
    if let (Some(lo), Some(hi)) = (min, max) {
        if lo > hi {
            return Err(Error::InvalidConstraints(format!(
                "min_count {lo} exceeds max_count {hi}"
            )));
        }
    }
    Ok(())
}

/// Streams all partitions of a sum satisfying the given constraints.
pub fn enumerate_partitions(constraints: &PartitionConstraints) -> Result<Partitions> {
    constraints.validate()?;
    Ok(Partitions::raw(
        constraints.sum,
        constraints.min_count.unwrap_or(0),
        constraints.max_count.unwrap_or(u32::MAX),
        constraints.max_part.unwrap_or(u32::MAX),
    ))
}

/// Lexicographic depth-first generator over nondecreasing part sequences.
///
/// Candidate parts are pruned with an exact feasibility test on the
/// remainder, so the search never enters a branch that yields nothing.
#[derive(Clone, Debug)]
pub struct Partitions {
    sum: u32,
    min_count: u32,
    max_count: u32,
    max_part: u32,
    parts: Vec<u32>,
    filled: u32,
    state: State,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Fresh,
    Running,
    Done,
}

impl Partitions {
    /// No validation; a zero `sum` yields the empty sequence once when
    /// `min_count` is zero. Used for sharding by largest part.
    pub(crate) fn raw(sum: u32, min_count: u32, max_count: u32, max_part: u32) -> Self {
        Partitions {
            sum,
            min_count,
            max_count,
            max_part,
            parts: Vec::new(),
            filled: 0,
            state: State::Fresh,
        }
    }

    /// Can `x` be appended when `count` parts already cover all but `rest`?
    fn feasible(&self, count: u32, rest: u32, x: u32) -> bool {
        if x > rest || x > self.max_part {
            return false;
        }
        let after = rest - x;
        let count = count + 1;
        if after == 0 {
            return count >= self.min_count && count <= self.max_count;
        }
        if after < x {
            return false;
        }
        let fewest = after.div_ceil(self.max_part);
        let most = after / x;
        fewest <= most
            && u64::from(count) + u64::from(fewest) <= u64::from(self.max_count)
            && u64::from(count) + u64::from(most) >= u64::from(self.min_count)
    }

    fn first_feasible(&self, from: u32) -> Option<u32> {
        let count = self.parts.len() as u32;
        let rest = self.sum - self.filled;
        // Apart from `rest` itself, a part must leave room for a second part
        // at least as large.
        let upper = (rest / 2).min(self.max_part);
        (from..=upper)
            .find(|&x| self.feasible(count, rest, x))
            .or_else(|| (rest >= from && self.feasible(count, rest, rest)).then_some(rest))
    }

    fn extend(&mut self) -> bool {
        while self.filled < self.sum {
            let lo = self.parts.last().copied().unwrap_or(1);
            match self.first_feasible(lo) {
                Some(x) => {
                    self.parts.push(x);
                    self.filled += x;
                }
                None => return false,
            }
        }
        true
    }

    fn advance(&mut self) -> bool {
        while let Some(x) = self.parts.pop() {
            self.filled -= x;
            if let Some(y) = self.first_feasible(x + 1) {
                self.parts.push(y);
                self.filled += y;
                if self.extend() {
                    return true;
                }
            }
        }
        false
    }

    /// Like `next`, but exposes the raw part slice (possibly empty for a zero
    /// sum) without allocating.
    pub(crate) fn next_slice(&mut self) -> Option<&[u32]> {
        let found = match self.state {
            State::Done => false,
            State::Fresh => {
                self.state = State::Running;
                if self.sum == 0 {
                    self.state = State::Done;
                    return (self.min_count == 0).then_some(&self.parts[..]);
                }
                self.extend() || self.advance()
            }
            State::Running => self.advance(),
        };
        if found {
            Some(&self.parts)
        } else {
            self.state = State::Done;
            None
        }
    }
}

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        self.next_slice()
            .map(|s| Partition::from_sorted(s.to_vec()))
    }
}

/// Number of unconstrained partitions of `n`, by Euler's pentagonal-number
/// recurrence. Independent of the enumerator.
pub fn count_partitions(n: u32) -> Result<u128> {
    if n == 0 {
        return Err(Error::InvalidConstraints("sum must be at least 1".into()));
    }
    let n = n as usize;
    let mut p: Vec<i128> = vec![0; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let mut acc: i128 = 0;
        for k in 1.. {
            let first = k * (3 * k - 1) / 2;
            if first > m {
                break;
            }
            let second = k * (3 * k + 1) / 2;
            let mut term = p[m - first];
            if second <= m {
                term = term
                    .checked_add(p[m - second])
                    .ok_or(Error::CountOverflow(m))?;
            }
            acc = if k % 2 == 1 {
                acc.checked_add(term)
            } else {
                acc.checked_sub(term)
            }
            .ok_or(Error::CountOverflow(m))?;
        }
        p[m] = acc;
    }
    Ok(p[n] as u128)
}
