use rayon::prelude::*;

use crate::dioph::CircleArc;
use crate::error::{Error, Result};
use crate::sets::{Interval, WindowSet};
use crate::sumset::frame::{candidate_range, BitFrame};

/// One carrier block: members of the set inside `span` all have
/// `frac(n * theta)` on `arc` when an arc is given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub span: Interval,
    pub arc: Option<CircleArc>,
}

/// A window set (based at 0) together with its block layout.
///
/// The layout lets [`blocked_sumset`] search for witnesses pair of blocks by
/// pair of blocks instead of materializing every shift, which is what makes
/// windows of 10^8..10^9 bits tractable.
#[derive(Clone, Debug)]
pub struct BlockedSet {
    bits: WindowSet,
    blocks: Vec<Block>,
    rotation: Option<u128>,
}

impl BlockedSet {
    pub fn new(bits: WindowSet, blocks: Vec<Block>, rotation: Option<u128>) -> Result<Self> {
        if bits.base() != 0 {
            return Err(Error::Precondition("blocked sets are based at 0".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.span.hi() > bits.end() {
                return Err(Error::WindowBounds(format!("block {i} leaves the window")));
            }
            if i > 0 && blocks[i - 1].span.hi() > b.span.lo() {
                return Err(Error::BlockOverlap { index: i });
            }
            if b.arc.is_some() && rotation.is_none() {
                return Err(Error::Precondition("arc given without a rotation".into()));
            }
        }
        Ok(BlockedSet { bits, blocks, rotation })
    }

    pub fn bits(&self) -> &WindowSet {
        &self.bits
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn rotation(&self) -> Option<u128> {
        self.rotation
    }

    pub fn min(&self) -> Option<u64> {
        self.bits.iter().next()
    }

    /// Members of block `j` only.
    pub fn block_members(&self, j: usize) -> Result<WindowSet> {
        let span = self.blocks[j].span;
        self.bits.restrict(span.lo(), span.len())
    }
}

#[derive(Clone, Debug)]
pub struct PairInfo {
    pub j: usize,
    pub k: usize,
    pub sum: Interval,
    pub arc: Option<CircleArc>,
}

/// Word-parallel witness search over a [`BlockedSet`].
pub struct PairSearch<'a> {
    set: &'a BlockedSet,
    frame: BitFrame,
    pairs: Vec<PairInfo>,
}

impl<'a> PairSearch<'a> {
    pub fn new(set: &'a BlockedSet) -> Self {
        let frame = BitFrame::new(&set.bits);
        let n = set.blocks.len();
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        for j in 0..n {
            for k in j..n {
                let (bj, bk) = (&set.blocks[j], &set.blocks[k]);
                let arc = match (bj.arc, bk.arc, set.rotation) {
                    (Some(x), Some(y), Some(_)) => Some(x.sum(&y)).filter(|a| !a.is_full()),
                    _ => None,
                };
                pairs.push(PairInfo { j, k, sum: bj.span.sum(&bk.span), arc });
            }
        }
        pairs.sort_by_key(|p| std::cmp::Reverse(p.sum.len()));
        PairSearch { set, frame, pairs }
    }

    pub fn pairs(&self) -> &[PairInfo] {
        &self.pairs
    }

    /// Fixed-point `frac(x * theta)`, or 0 without a rotation.
    #[inline]
    pub fn phase(&self, x: u64) -> u128 {
        self.set.rotation.map_or(0, |t| (x as u128).wrapping_mul(t))
    }

    /// Is there `a` in block `j` and `b` in block `k`, both members, with `a + b = x`?
    #[inline]
    pub fn pair_has_witness(&self, j: usize, k: usize, x: u64) -> bool {
        let (sj, sk) = (self.set.blocks[j].span, self.set.blocks[k].span);
        let (lo, hi) = candidate_range(x, sj.lo(), sj.hi(), sk.lo(), sk.hi());
        self.frame.any_pair(&self.frame, x, lo, hi)
    }

    /// Membership of `x` in the sumset of the whole blocked set.
    #[inline]
    pub fn contains_sum(&self, x: u64, candidates: &[&PairInfo]) -> bool {
        let t = self.phase(x);
        candidates.iter().any(|p| {
            p.sum.contains(x)
                && p.arc.is_none_or(|arc| arc.contains(t))
                && self.pair_has_witness(p.j, p.k, x)
        })
    }

    /// Sums `x0 + i` (for bits `i` of `need`) that one of a few sampled
    /// members `a` of block `j` writes as `a + b` with `b` a member of block `k`.
    ///
    /// A subset of the true answer; each sample costs one word load.
    #[inline]
    pub fn sample_cover(&self, j: usize, k: usize, x0: u64, need: u64) -> u64 {
        let (sj, sk) = (self.set.blocks[j].span, self.set.blocks[k].span);
        let (lo, hi) = candidate_range(x0 + 32, sj.lo(), sj.hi(), sk.lo(), sk.hi());
        if lo >= hi {
            return 0;
        }
        let step = ((hi - lo) / SAMPLES).max(1);
        let mut covered = 0;
        let mut probe = lo;
        for _ in 0..SAMPLES {
            let Some(a) = self.frame.next_member(probe, hi) else { break };
            let (x0, a) = (x0 as i64, a as i64);
            let b_ok = range_mask(sk.lo() as i64 + a - x0, sk.hi() as i64 + a - x0);
            covered |= self.frame.word_at(x0 - a) & b_ok & need;
            if covered == need {
                break;
            }
            probe = a as u64 + step;
        }
        covered
    }

    /// Exact: the bits of `need` whose sums have a witness in blocks `j`, `k`.
    pub fn pair_cover(&self, j: usize, k: usize, x0: u64, need: u64) -> u64 {
        let mut covered = self.sample_cover(j, k, x0, need);
        let mut rest = need & !covered;
        while rest != 0 {
            let i = rest.trailing_zeros();
            rest &= rest - 1;
            if self.pair_has_witness(j, k, x0 + i as u64) {
                covered |= 1 << i;
            }
        }
        covered
    }

    /// Pairs whose sum span meets `[lo, hi)`.
    pub fn pairs_meeting(&self, lo: u64, hi: u64) -> Vec<&PairInfo> {
        self.pairs.iter().filter(|p| p.sum.lo() < hi && p.sum.hi() > lo).collect()
    }
}

const CHUNK_WORDS: usize = 1024;

/// Witness samples tried per word before falling back to the exact search.
const SAMPLES: u64 = 8;

/// Bits `i ∈ [0, 64)` with `lo <= i < hi`.
#[inline]
pub(crate) fn range_mask(lo: i64, hi: i64) -> u64 {
    let (lo, hi) = (lo.clamp(0, 64), hi.clamp(0, 64));
    if lo >= hi {
        return 0;
    }
    let upper = if hi == 64 { !0 } else { (1u64 << hi) - 1 };
    upper & !((1u64 << lo) - 1)
}

/// `(A + A) ∩ out` for a blocked set, by exact witness search.
pub fn blocked_sumset(set: &BlockedSet, out: Interval) -> Result<WindowSet> {
    let limit = 2 * set.bits.end() - 1;
    if out.hi() > limit {
        return Err(Error::WindowBounds(format!(
            "output end {} beyond exact span end {limit}",
            out.hi()
        )));
    }
    let search = PairSearch::new(set);
    let mut dst = vec![0u64; out.len().div_ceil(64) as usize];
    dst.par_chunks_mut(CHUNK_WORDS).enumerate().for_each(|(ci, chunk)| {
        let lo = out.lo() + (ci * CHUNK_WORDS) as u64 * 64;
        let hi = (lo + chunk.len() as u64 * 64).min(out.hi());
        let cands = search.pairs_meeting(lo, hi);
        if cands.is_empty() {
            return;
        }
        for (wi, word) in chunk.iter_mut().enumerate() {
            let x0 = lo + wi as u64 * 64;
            let live = range_mask(0, (hi - x0.min(hi)) as i64);
            let mut covered = 0;
            let mut reachable = 0;
            for p in &cands {
                let m = range_mask(p.sum.lo() as i64 - x0 as i64, p.sum.hi() as i64 - x0 as i64) & live;
                reachable |= m;
                let need = m & !covered;
                if need != 0 {
                    covered |= search.sample_cover(p.j, p.k, x0, need);
                }
            }
            let mut rest = reachable & !covered;
            while rest != 0 {
                let i = rest.trailing_zeros();
                rest &= rest - 1;
                if search.contains_sum(x0 + i as u64, &cands) {
                    covered |= 1 << i;
                }
            }
            *word = covered;
        }
    });
    WindowSet::from_words(out.lo(), out.len(), dst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sumset::sumset_window;
    use proptest::prelude::*;

    fn blocked_from(members: &[u64], spans: &[(u64, u64)], len: u64) -> BlockedSet {
        let bits = WindowSet::from_members(0, len, members.iter().copied()).unwrap();
        let blocks = spans
            .iter()
            .map(|&(lo, hi)| Block { span: Interval::new(lo, hi).unwrap(), arc: None })
            .collect();
        BlockedSet::new(bits, blocks, None).unwrap()
    }

    #[test]
    fn small_blocked_sumset() {
        let s = blocked_from(&[1, 2, 10, 12], &[(0, 5), (5, 20)], 20);
        let got: Vec<u64> = blocked_sumset(&s, Interval::new(0, 39).unwrap()).unwrap().iter().collect();
        assert_eq!(got, vec![2, 3, 4, 11, 12, 13, 14, 20, 22, 24]);
    }

    proptest! {
        #[test]
        fn agrees_with_shift_or(
            members in prop::collection::btree_set(0u64..700, 0..300),
            cut1 in 1u64..300, cut2 in 300u64..699,
        ) {
            let m: Vec<u64> = members.into_iter().collect();
            let s = blocked_from(&m, &[(0, cut1), (cut1, cut2), (cut2, 700)], 700);
            let out = Interval::new(0, 1399).unwrap();
            let fast = blocked_sumset(&s, out).unwrap();
            let reference = sumset_window(s.bits(), s.bits(), out).unwrap();
            prop_assert_eq!(fast.iter().collect::<Vec<_>>(), reference.iter().collect::<Vec<_>>());
        }
    }
}
