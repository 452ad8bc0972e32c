use crate::error::{Error, Result};
use crate::sets::{mask_tail, Interval, IntervalUnion, WindowSet};

/// `U + V` as a normalized union.
pub fn sumset_intervals(u: &IntervalUnion, v: &IntervalUnion) -> IntervalUnion {
    let mut sums = Vec::with_capacity(u.intervals().len() * v.intervals().len());
    for a in u.intervals() {
        for b in v.intervals() {
            sums.push(a.sum(b));
        }
    }
    IntervalUnion::normalize(sums)
}

/// Below this many members the shifted copies cost more than they save.
const COPY_THRESHOLD: u64 = 96;

/// `(A + B) ∩ out` by shift-or over the members of the sparser operand.
///
/// `out` must lie inside `[a.base + b.base, a.end + b.end - 1)`, the span on
/// which the windowed sum is exact.
pub fn sumset_window(a: &WindowSet, b: &WindowSet, out: Interval) -> Result<WindowSet> {
    let span_lo = a.base() + b.base();
    let span_hi = a.end() + b.end() - 1;
    if out.lo() < span_lo || out.hi() > span_hi {
        return Err(Error::WindowBounds(format!(
            "output [{}, {}) outside exact span [{span_lo}, {span_hi})",
            out.lo(),
            out.hi()
        )));
    }
    let (small, large) = if a.count_ones() <= b.count_ones() { (a, b) } else { (b, a) };
    let mut dst = vec![0u64; out.len().div_ceil(64) as usize];
    let src = large.words();
    let copies = (small.count_ones() >= COPY_THRESHOLD).then(|| shifted_copies(src));
    for s in small.iter() {
        let offset = (large.base() + s) as i128 - out.lo() as i128;
        let q = offset.div_euclid(64) as i64;
        let r = offset.rem_euclid(64) as u32;
        match &copies {
            Some(c) => or_words(&mut dst, &c[r as usize], q),
            None => or_shifted(&mut dst, src, q, r),
        }
    }
    mask_tail(&mut dst, out.len());
    WindowSet::from_words(out.lo(), out.len(), dst)
}

/// `copies[r]` holds `src` shifted up by `r` bits, one word longer.
fn shifted_copies(src: &[u64]) -> Vec<Vec<u64>> {
    (0..64u32)
        .map(|r| {
            let mut v = Vec::with_capacity(src.len() + 1);
            let mut prev = 0u64;
            for &w in src {
                v.push(if r == 0 { w } else { (w << r) | (prev >> (64 - r)) });
                prev = w;
            }
            v.push(if r == 0 { 0 } else { prev >> (64 - r) });
            v
        })
        .collect()
}

fn clip(dst_len: usize, src_len: usize, q: i64) -> (usize, usize) {
    let start = (-q).max(0) as usize;
    let end = (dst_len as i64 - q).clamp(0, src_len as i64) as usize;
    (start, end)
}

fn or_words(dst: &mut [u64], src: &[u64], q: i64) {
    let (start, end) = clip(dst.len(), src.len(), q);
    for i in start..end {
        dst[(q + i as i64) as usize] |= src[i];
    }
}

fn or_shifted(dst: &mut [u64], src: &[u64], q: i64, r: u32) {
    let n = src.len() + 1;
    let (start, end) = clip(dst.len(), n, q);
    for i in start..end {
        let cur = src.get(i).copied().unwrap_or(0);
        let word = if r == 0 {
            cur
        } else {
            let prev = if i > 0 { src[i - 1] } else { 0 };
            (cur << r) | (prev >> (64 - r))
        };
        dst[(q + i as i64) as usize] |= word;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn interval_sumset_examples() {
        let u = IntervalUnion::from_pairs(&[(1, 3), (10, 12)]).unwrap();
        let v = IntervalUnion::from_pairs(&[(0, 2)]).unwrap();
        assert_eq!(
            sumset_intervals(&u, &v),
            IntervalUnion::from_pairs(&[(1, 4), (10, 13)]).unwrap()
        );
        assert!(sumset_intervals(&IntervalUnion::empty(), &v).is_empty());
    }

    #[test]
    fn window_bounds_are_enforced() {
        let a = WindowSet::from_members(0, 10, [1, 2]).unwrap();
        assert!(sumset_window(&a, &a, Interval::new(0, 20).unwrap()).is_err());
        assert!(sumset_window(&a, &a, Interval::new(0, 19).unwrap()).is_ok());
    }

    fn brute(a: &BTreeSet<u64>, b: &BTreeSet<u64>, out: Interval) -> Vec<u64> {
        let mut s = BTreeSet::new();
        for x in a {
            for y in b {
                if out.contains(x + y) {
                    s.insert(x + y);
                }
            }
        }
        s.into_iter().collect()
    }

    proptest! {
        #[test]
        fn shift_or_matches_pairwise(
            a in prop::collection::btree_set(0u64..400, 0..200),
            b in prop::collection::btree_set(0u64..300, 0..150),
            base_a in 0u64..70, base_b in 0u64..70,
            lo_off in 0u64..300, len in 1u64..500,
        ) {
            let wa = WindowSet::from_members(base_a, 400, a.iter().map(|x| x + base_a)).unwrap();
            let wb = WindowSet::from_members(base_b, 300, b.iter().map(|x| x + base_b)).unwrap();
            let lo = base_a + base_b + lo_off;
            let hi = (lo + len).min(wa.end() + wb.end() - 1);
            prop_assume!(lo < hi);
            let out = Interval::new(lo, hi).unwrap();
            let got: Vec<u64> = sumset_window(&wa, &wb, out).unwrap().iter().collect();
            let sa: BTreeSet<u64> = wa.iter().collect();
            let sb: BTreeSet<u64> = wb.iter().collect();
            prop_assert_eq!(got, brute(&sa, &sb, out));
        }
    }
}
