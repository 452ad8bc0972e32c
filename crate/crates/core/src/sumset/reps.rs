use serde::Serialize;

use crate::error::{Error, Result};
use crate::sets::Interval;

/// Representation counts of `x` as a sum from `I × J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RepCounts {
    /// Ordered pairs `(i, j)` with `i + j = x`.
    pub unrestricted: u64,
    /// Unordered pairs `{i, j}`, `i ≠ j`, with `(i, j) ∈ I × J` in some order.
    pub restricted: u64,
}

fn ordered_range(x: u64, i: &Interval, j: &Interval) -> (u64, u64) {
    let lo = i.lo().max((x + 1).saturating_sub(j.hi()));
    let hi = match (x + 1).checked_sub(j.lo()) {
        Some(u) => i.hi().min(u),
        None => lo,
    };
    (lo, hi.max(lo))
}

pub fn rep_count(x: u64, i: &Interval, j: &Interval) -> RepCounts {
    let (lo, hi) = ordered_range(x, i, j);
    let unrestricted = hi - lo;
    let on_diag = |a: u64, b: u64| x % 2 == 0 && a <= x / 2 && x / 2 < b;
    let diag = u64::from(on_diag(lo, hi));
    let (slo, shi) = ordered_range(x, j, i);
    let (blo, bhi) = (lo.max(slo), hi.min(shi));
    let symmetric = if blo < bhi { bhi - blo - u64::from(on_diag(blo, bhi)) } else { 0 };
    RepCounts { unrestricted, restricted: unrestricted - diag - symmetric / 2 }
}

/// Closed form of the unrestricted count for intervals.
pub fn rep_count_closed_form(x: u64, i: &Interval, j: &Interval) -> u64 {
    let s = i.sum(j);
    if !s.contains(x) {
        return 0;
    }
    (x - s.lo() + 1).min(i.len()).min(j.len()).min(s.last() - x + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepresReport {
    pub m: u64,
    pub n: u64,
    pub r: u64,
    /// `#{x ∈ I + J : R'(x) ≤ r}`.
    pub unrestricted_exceptions: u64,
    /// `#{x ∈ I + J : R(x) < r}`.
    pub restricted_exceptions: u64,
    pub unrestricted_bound: u64,
    pub restricted_bound: u64,
    pub holds: bool,
}

/// Counts the exceptions of the interval representation bounds for `I`, `J`
/// of lengths `m`, `n` placed at `i`, `j`.
pub fn check_repres_lemma_on(i: &Interval, j: &Interval, r: u64) -> Result<RepresReport> {
    if r > i.len().min(j.len()) {
        return Err(Error::Precondition(format!(
            "r = {r} exceeds the shorter length {}",
            i.len().min(j.len())
        )));
    }
    let s = i.sum(j);
    let (mut ue, mut re) = (0, 0);
    for x in s.lo()..s.hi() {
        let c = rep_count(x, i, j);
        ue += u64::from(c.unrestricted <= r);
        re += u64::from(c.restricted < r);
    }
    Ok(RepresReport {
        m: i.len(),
        n: j.len(),
        r,
        unrestricted_exceptions: ue,
        restricted_exceptions: re,
        unrestricted_bound: 2 * r,
        restricted_bound: 4 * r,
        holds: ue <= 2 * r && re <= 4 * r,
    })
}

/// Same, with `I = ⟦1, m⟧` and `J = ⟦1, n⟧` (maximal overlap).
pub fn check_repres_lemma(m: u64, n: u64, r: u64) -> Result<RepresReport> {
    if m == 0 || n == 0 {
        return Err(Error::Precondition("interval lengths must be positive".into()));
    }
    check_repres_lemma_on(&Interval::closed(1, m)?, &Interval::closed(1, n)?, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(a: u64, b: u64) -> Interval {
        Interval::closed(a, b).unwrap()
    }

    #[test]
    fn examples() {
        let i = iv(1, 4);
        assert_eq!(rep_count(5, &i, &i), RepCounts { unrestricted: 4, restricted: 2 });
        assert_eq!(rep_count(4, &i, &i), RepCounts { unrestricted: 3, restricted: 1 });
        assert_eq!(rep_count(1, &i, &i).unrestricted, 0);
        assert_eq!(rep_count_closed_form(5, &i, &i), 4);
    }

    #[test]
    fn exception_bounds_example() {
        let rep = check_repres_lemma(10, 10, 3).unwrap();
        assert_eq!(rep.unrestricted_exceptions, 6);
        assert!(rep.holds);
        assert!(check_repres_lemma(5, 10, 6).is_err());
    }

    #[test]
    fn disjoint_intervals_restricted_equals_unrestricted() {
        let (i, j) = (iv(1, 7), iv(20, 31));
        for x in 0..80 {
            let c = rep_count(x, &i, &j);
            assert_eq!(c.restricted, c.unrestricted);
        }
    }
}
