//! Finite subsets of `ℕ` as strictly increasing sequences.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A sequence that is not strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("set elements must be strictly increasing (position {0})")]
pub struct NotIncreasing(pub usize);

/// A finite set of naturals listed in increasing order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FiniteSet(Vec<u64>);

impl TryFrom<Vec<u64>> for FiniteSet {
    type Error = NotIncreasing;
    fn try_from(v: Vec<u64>) -> Result<Self, Self::Error> {
        FiniteSet::new(v)
    }
}

impl From<FiniteSet> for Vec<u64> {
    fn from(s: FiniteSet) -> Self {
        s.0
    }
}

impl Deref for FiniteSet {
    type Target = [u64];
    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(">")
    }
}

impl FiniteSet {
    /// Validates strict monotonicity.
    pub fn new(v: Vec<u64>) -> Result<Self, NotIncreasing> {
        match v.windows(2).position(|w| w[0] >= w[1]) {
            Some(i) => Err(NotIncreasing(i + 1)),
            None => Ok(FiniteSet(v)),
        }
    }

    /// Wraps a vector the caller knows is strictly increasing.
    pub fn from_sorted(v: Vec<u64>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        FiniteSet(v)
    }

    /// Sorts and deduplicates arbitrary input.
    pub fn from_unsorted(mut v: Vec<u64>) -> Self {
        v.sort_unstable();
        v.dedup();
        FiniteSet(v)
    }

    /// The empty set.
    pub fn empty() -> Self {
        FiniteSet(Vec::new())
    }

    /// `{lo, …, hi-1}`.
    pub fn range(lo: u64, hi: u64) -> Self {
        FiniteSet((lo..hi).collect())
    }

    /// The elements.
    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    /// `s*`: the set without its maximum.
    pub fn star(&self) -> Self {
        let mut v = self.0.clone();
        v.pop();
        FiniteSet(v)
    }

    /// `X⁻`: the set without its minimum.
    pub fn minus(&self) -> Self {
        FiniteSet(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    /// The first `k` elements.
    pub fn prefix(&self, k: usize) -> Self {
        FiniteSet(self.0[..k.min(self.0.len())].to_vec())
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &FiniteSet) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `self ⊏ other`.
    pub fn is_proper_prefix_of(&self, other: &FiniteSet) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }

    /// `self ⊆ other` as sets.
    pub fn is_subset_of(&self, other: &FiniteSet) -> bool {
        self.0.iter().all(|x| other.0.binary_search(x).is_ok())
    }

    /// `self ⌢ other`, or `None` unless `max self < min other`.
    pub fn concat(&self, other: &[u64]) -> Option<Self> {
        match (self.0.last(), other.first()) {
            (Some(a), Some(b)) if a >= b => None,
            _ => {
                let mut v = self.0.clone();
                v.extend_from_slice(other);
                Some(FiniteSet(v))
            }
        }
    }

    /// `self ⌢ ⟨n⟩`, or `None` unless `max self < n`.
    pub fn push(&self, n: u64) -> Option<Self> {
        self.concat(&[n])
    }
}

/// Parses `a,b,c`, `a..b` (half-open) or the empty string.
pub fn parse_set(text: &str) -> Result<FiniteSet, String> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(FiniteSet::empty());
    }
    if let Some((a, b)) = t.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
        return Ok(FiniteSet::range(a, b));
    }
    let v = t
        .split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| format!("bad element {x:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    FiniteSet::new(v).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_operations() {
        let s = FiniteSet::new(vec![2, 5, 8]).unwrap();
        assert_eq!(s.star().as_slice(), &[2, 5]);
        assert_eq!(s.minus().as_slice(), &[5, 8]);
        assert!(s.star().is_proper_prefix_of(&s));
        assert!(s.concat(&[8]).is_none());
        assert_eq!(s.push(9).unwrap().as_slice(), &[2, 5, 8, 9]);
        assert!(FiniteSet::new(vec![3, 3]).is_err());
        assert_eq!(parse_set("0..4").unwrap().as_slice(), &[0, 1, 2, 3]);
        assert_eq!(parse_set("1, 4").unwrap().as_slice(), &[1, 4]);
        assert!(parse_set("4,1").is_err());
        assert_eq!(s.to_string(), "<2,5,8>");
    }
}
