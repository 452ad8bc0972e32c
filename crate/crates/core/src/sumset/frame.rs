use crate::sets::{mask_tail, WindowSet};

/// A window set based at 0 stored forwards and bit-reversed, so that
/// "`a ∈ X` and `x - a ∈ Y`" can be tested 64 candidates `a` at a time.
#[derive(Clone, Debug)]
pub struct BitFrame {
    fwd: Vec<u64>,
    rev: Vec<u64>,
    top: u64,
}

#[inline]
fn load(words: &[u64], pos: u64) -> u64 {
    let w = (pos >> 6) as usize;
    let r = (pos & 63) as u32;
    if r == 0 {
        words[w]
    } else {
        (words[w] >> r) | (words[w + 1] << (64 - r))
    }
}

impl BitFrame {
    /// `set` must be based at 0.
    pub fn new(set: &WindowSet) -> Self {
        assert_eq!(set.base(), 0, "frames are based at 0");
        let src = set.words();
        let len = set.len();
        let mut flipped: Vec<u64> = src.iter().rev().map(|w| w.reverse_bits()).collect();
        flipped.extend([0, 0]);
        let shift = src.len() as u64 * 64 - len;
        let mut rev: Vec<u64> = (0..src.len()).map(|i| load(&flipped, i as u64 * 64 + shift)).collect();
        mask_tail(&mut rev, len);
        rev.extend([0, 0]);
        let mut fwd = src.to_vec();
        fwd.extend([0, 0]);
        BitFrame { fwd, rev, top: len - 1 }
    }

    pub fn len(&self) -> u64 {
        self.top + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Bits `[pos, pos + 64)` of the set; positions below 0 or past the end read as 0.
    #[inline]
    pub fn word_at(&self, pos: i64) -> u64 {
        if pos >= 0 {
            if pos as u64 > self.top {
                0
            } else {
                load(&self.fwd, pos as u64)
            }
        } else if pos > -64 {
            load(&self.fwd, 0) << (-pos) as u32
        } else {
            0
        }
    }

    /// Smallest member in `[from, to)`.
    pub fn next_member(&self, from: u64, to: u64) -> Option<u64> {
        let to = to.min(self.top + 1);
        let mut pos = from;
        while pos < to {
            let w = self.fwd[(pos / 64) as usize] >> (pos % 64);
            if w != 0 {
                let m = pos + w.trailing_zeros() as u64;
                return (m < to).then_some(m);
            }
            pos = (pos / 64 + 1) * 64;
        }
        None
    }

    /// Mask of candidates `a .. a + 64` (clipped to `hi`) with `a ∈ self`, `x - a ∈ other`.
    ///
    /// Callers keep `a <= x` and `x - a < other.len()`.
    #[inline]
    fn chunk(&self, other: &BitFrame, x: u64, a: u64, hi: u64) -> u64 {
        let mut m = load(&self.fwd, a) & load(&other.rev, other.top + a - x);
        let n = hi - a;
        if n < 64 {
            m &= (1u64 << n) - 1;
        }
        m
    }

    /// Is there `a ∈ [lo, hi)` with `a ∈ self` and `x - a ∈ other`?
    #[inline]
    pub fn any_pair(&self, other: &BitFrame, x: u64, lo: u64, hi: u64) -> bool {
        let mut a = lo;
        while a < hi {
            if self.chunk(other, x, a, hi) != 0 {
                return true;
            }
            a += 64;
        }
        false
    }

    /// Number of `a ∈ [lo, hi)` with `a ∈ self` and `x - a ∈ other`.
    pub fn count_pairs(&self, other: &BitFrame, x: u64, lo: u64, hi: u64) -> u64 {
        let mut a = lo;
        let mut total = 0;
        while a < hi {
            total += self.chunk(other, x, a, hi).count_ones() as u64;
            a += 64;
        }
        total
    }
}

/// Candidate range `[lo, hi)` for `a` with `a ∈ [i_lo, i_hi)` and `x - a ∈ [j_lo, j_hi)`.
#[inline]
pub fn candidate_range(x: u64, i_lo: u64, i_hi: u64, j_lo: u64, j_hi: u64) -> (u64, u64) {
    let lo = i_lo.max((x + 1).saturating_sub(j_hi));
    let hi = match (x + 1).checked_sub(j_lo) {
        Some(u) => i_hi.min(u),
        None => lo,
    };
    (lo, hi.max(lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn counts_match_brute_force(
            xs in prop::collection::btree_set(0u64..300, 0..120),
            ys in prop::collection::btree_set(0u64..300, 0..120),
            x in 0u64..600,
        ) {
            let fx = BitFrame::new(&WindowSet::from_members(0, 300, xs.iter().copied()).unwrap());
            let fy = BitFrame::new(&WindowSet::from_members(0, 300, ys.iter().copied()).unwrap());
            let (lo, hi) = candidate_range(x, 0, 300, 0, 300);
            let brute = xs.iter().filter(|&&a| a <= x && ys.contains(&(x - a))).count() as u64;
            prop_assert_eq!(fx.count_pairs(&fy, x, lo, hi), brute);
            prop_assert_eq!(fx.any_pair(&fy, x, lo, hi), brute > 0);
        }

        #[test]
        fn word_and_member_queries(xs in prop::collection::btree_set(0u64..300, 0..80), pos in -70i64..320, from in 0u64..300) {
            let f = BitFrame::new(&WindowSet::from_members(0, 300, xs.iter().copied()).unwrap());
            let expect = (0..64).filter(|&i| pos + i >= 0 && xs.contains(&((pos + i) as u64))).fold(0u64, |w, i| w | 1 << i);
            prop_assert_eq!(f.word_at(pos), expect);
            prop_assert_eq!(f.next_member(from, 250), xs.range(from.min(250)..250).next().copied());
        }
    }
}
