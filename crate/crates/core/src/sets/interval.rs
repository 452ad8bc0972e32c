use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::WindowSet;

/// Half-open interval `[lo, hi)` of naturals, never empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct Interval {
    lo: u64,
    hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo >= hi {
            return Err(Error::MalformedInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    /// Closed interval `⟦a, b⟧`.
    pub fn closed(a: u64, b: u64) -> Result<Self> {
        let hi = b
            .checked_add(1)
            .ok_or(Error::MalformedInterval { lo: a, hi: b })?;
        Interval::new(a, hi)
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Largest element.
    pub fn last(&self) -> u64 {
        self.hi - 1
    }

    pub fn len(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: u64) -> bool {
        self.lo <= x && x < self.hi
    }

    /// Minkowski sum `{a + b}`; `[a, b) + [c, d) = [a + c, b + d - 1)`.
    pub fn sum(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi - 1,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }

    /// Number of elements in `[1, x]`.
    pub fn count_leq(&self, x: u64) -> u64 {
        let lo = self.lo.max(1);
        let hi = self.hi.min(x.saturating_add(1));
        hi.saturating_sub(lo)
    }
}

impl TryFrom<(u64, u64)> for Interval {
    type Error = Error;
    fn try_from((lo, hi): (u64, u64)) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for (u64, u64) {
    fn from(i: Interval) -> Self {
        (i.lo, i.hi)
    }
}

/// Finite union of intervals kept sorted, disjoint and non-adjacent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion::default()
    }

    /// Sorts and merges overlapping or adjacent intervals.
    pub fn normalize(raw: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = raw.into_iter().collect();
        v.sort_unstable();
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => out.push(iv),
            }
        }
        IntervalUnion { intervals: out }
    }

    /// Validating constructor from raw `(lo, hi)` pairs.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        let ivs = pairs
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalUnion::normalize(ivs))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.intervals.first().map(|i| i.lo)
    }

    pub fn max(&self) -> Option<u64> {
        self.intervals.last().map(|i| i.last())
    }

    pub fn cardinality(&self) -> u64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: u64) -> bool {
        let idx = self.intervals.partition_point(|i| i.hi <= x);
        self.intervals.get(idx).is_some_and(|i| i.contains(x))
    }

    /// `|self ∩ [1, x]|`.
    pub fn count_leq(&self, x: u64) -> u64 {
        let mut total = 0;
        for iv in &self.intervals {
            if iv.lo > x {
                break;
            }
            total += iv.count_leq(x);
        }
        total
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        IntervalUnion::normalize(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersection(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a, b) = (self.intervals[i], other.intervals[j]);
            if let Some(x) = a.intersect(&b) {
                out.push(x);
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion::normalize(out)
    }

    pub fn difference(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        let mut j = 0;
        for &a in &self.intervals {
            let mut cur = a.lo;
            while j < other.intervals.len() && other.intervals[j].hi <= cur {
                j += 1;
            }
            let mut k = j;
            while k < other.intervals.len() && other.intervals[k].lo < a.hi {
                let b = other.intervals[k];
                if b.lo > cur {
                    out.push(Interval { lo: cur, hi: b.lo });
                }
                cur = cur.max(b.hi);
                if cur >= a.hi {
                    break;
                }
                k += 1;
            }
            if cur < a.hi {
                out.push(Interval { lo: cur, hi: a.hi });
            }
        }
        IntervalUnion::normalize(out)
    }

    /// Restriction to `[lo, hi)`.
    pub fn clip(&self, window: &Interval) -> IntervalUnion {
        IntervalUnion::normalize(self.intervals.iter().filter_map(|i| i.intersect(window)))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.intervals.iter().flat_map(|i| i.lo..i.hi)
    }

    /// Bitset of `self ∩ [base, base + len)`.
    pub fn materialize(&self, base: u64, len: u64) -> Result<WindowSet> {
        let mut w = WindowSet::empty(base, len)?;
        let end = base + len;
        for iv in &self.intervals {
            let lo = iv.lo.max(base);
            let hi = iv.hi.min(end);
            if lo < hi {
                w.insert_range(lo, hi);
            }
        }
        Ok(w)
    }
}
