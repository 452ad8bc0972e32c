use crate::error::{Error, Result};

/// Explicit bitset over the window `[base, base + len)`.
///
/// Membership outside the window is undefined; `contains` panics there and
/// `count_leq` reports [`Error::OutOfWindow`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WindowSet {
    base: u64,
    len: u64,
    words: Vec<u64>,
}

impl WindowSet {
    pub fn empty(base: u64, len: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::WindowBounds("empty window".into()));
        }
        base.checked_add(len)
            .ok_or_else(|| Error::WindowBounds("window end overflows u64".into()))?;
        let words = usize::try_from(len.div_ceil(64))
            .map_err(|_| Error::WindowBounds("window too large".into()))?;
        Ok(WindowSet { base, len, words: vec![0; words] })
    }

    /// Wraps raw words; bits past `len` are cleared.
    pub fn from_words(base: u64, len: u64, mut words: Vec<u64>) -> Result<Self> {
        if len == 0 || words.len() as u64 != len.div_ceil(64) {
            return Err(Error::WindowBounds(format!(
                "{} words cannot hold a window of {len} bits",
                words.len()
            )));
        }
        mask_tail(&mut words, len);
        Ok(WindowSet { base, len, words })
    }

    pub fn from_members(base: u64, len: u64, members: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut w = WindowSet::empty(base, len)?;
        for x in members {
            if !w.in_window(x) {
                return Err(Error::OutOfWindow { x, base, end: base + len });
            }
            w.insert(x);
        }
        Ok(w)
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// One past the last window position.
    pub fn end(&self) -> u64 {
        self.base + self.len
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn in_window(&self, x: u64) -> bool {
        x >= self.base && x < self.end()
    }

    pub fn contains(&self, x: u64) -> bool {
        assert!(self.in_window(x), "membership query {x} outside window");
        let i = x - self.base;
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, x: u64) {
        assert!(self.in_window(x), "insert {x} outside window");
        let i = x - self.base;
        self.words[(i / 64) as usize] |= 1 << (i % 64);
    }

    /// Sets every position in `[lo, hi)`; both ends must lie in the window.
    pub fn insert_range(&mut self, lo: u64, hi: u64) {
        if lo >= hi {
            return;
        }
        assert!(lo >= self.base && hi <= self.end());
        let (a, b) = (lo - self.base, hi - self.base);
        let (wa, wb) = ((a / 64) as usize, ((b - 1) / 64) as usize);
        let head = !0u64 << (a % 64);
        let tail = !0u64 >> (63 - (b - 1) % 64);
        if wa == wb {
            self.words[wa] |= head & tail;
        } else {
            self.words[wa] |= head;
            for w in &mut self.words[wa + 1..wb] {
                *w = !0;
            }
            self.words[wb] |= tail;
        }
    }

    /// ORs `src` into `self`; `src`'s window must lie inside this one.
    pub fn or_from(&mut self, src: &WindowSet) -> Result<()> {
        if src.base < self.base || src.end() > self.end() {
            return Err(Error::WindowBounds("source window not contained in target".into()));
        }
        let off = src.base - self.base;
        let q = (off / 64) as usize;
        let r = (off % 64) as u32;
        for (i, &w) in src.words.iter().enumerate() {
            if w == 0 {
                continue;
            }
            self.words[q + i] |= w << r;
            if r != 0 && q + i + 1 < self.words.len() {
                self.words[q + i + 1] |= w >> (64 - r);
            }
        }
        Ok(())
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Members in `[base, x]`.
    fn count_through(&self, x: u64) -> u64 {
        let i = x - self.base;
        let full = (i / 64) as usize;
        let mut total: u64 = self.words[..full].iter().map(|w| w.count_ones() as u64).sum();
        let rem = i % 64;
        total += (self.words[full] & (!0u64 >> (63 - rem))).count_ones() as u64;
        total
    }

    /// `|S ∩ [1, x]|`, counting only what the window holds.
    pub fn count_leq(&self, x: u64) -> Result<u64> {
        if x >= self.end() {
            return Err(Error::OutOfWindow { x, base: self.base, end: self.end() });
        }
        if x < self.base {
            return Ok(0);
        }
        let mut c = self.count_through(x);
        if self.base == 0 && self.words[0] & 1 == 1 {
            c -= 1;
        }
        Ok(c)
    }

    /// Members in `[lo, hi)` (clipped to the window).
    pub fn count_range(&self, lo: u64, hi: u64) -> u64 {
        let lo = lo.max(self.base);
        let hi = hi.min(self.end());
        if lo >= hi {
            return 0;
        }
        let upto = self.count_through(hi - 1);
        let below = if lo > self.base { self.count_through(lo - 1) } else { 0 };
        upto - below
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let base = self.base;
        self.words.iter().enumerate().flat_map(move |(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as u64;
                bits &= bits - 1;
                Some(base + wi as u64 * 64 + t)
            })
        })
    }

    /// Bits in window order, position `base` first.
    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.words[(i / 64) as usize] >> (i % 64) & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    /// Same members re-based onto `[base, base + len)`; bits outside are dropped.
    pub fn restrict(&self, base: u64, len: u64) -> Result<WindowSet> {
        WindowSet::from_members(
            base,
            len,
            self.iter().filter(|&x| x >= base && x < base + len),
        )
    }
}

pub(crate) fn mask_tail(words: &mut [u64], len: u64) {
    let rem = len % 64;
    if rem != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn insert_range_across_words() {
        let mut w = WindowSet::empty(10, 200).unwrap();
        w.insert_range(70, 150);
        assert_eq!(w.count_ones(), 80);
        assert!(w.contains(70) && w.contains(149) && !w.contains(150) && !w.contains(69));
    }

    #[test]
    fn count_leq_outside_window_errors() {
        let w = WindowSet::empty(0, 10).unwrap();
        assert!(matches!(w.count_leq(10), Err(Error::OutOfWindow { .. })));
    }

    #[test]
    fn count_leq_ignores_zero() {
        let w = WindowSet::from_members(0, 10, [0, 1, 5]).unwrap();
        assert_eq!(w.count_leq(9).unwrap(), 2);
        assert_eq!(w.count_leq(0).unwrap(), 0);
    }

    #[test]
    fn or_from_unaligned() {
        let mut big = WindowSet::empty(3, 500).unwrap();
        let small = WindowSet::from_members(70, 100, [70, 100, 133, 169]).unwrap();
        big.or_from(&small).unwrap();
        assert_eq!(big.iter().collect::<Vec<_>>(), vec![70, 100, 133, 169]);
        assert!(big.or_from(&WindowSet::empty(0, 10).unwrap()).is_err());
    }

    proptest! {
        #[test]
        fn counts_match_iteration(members in prop::collection::btree_set(5u64..300, 0..60), x in 5u64..300) {
            let w = WindowSet::from_members(5, 295, members.iter().copied()).unwrap();
            prop_assert_eq!(w.iter().collect::<Vec<_>>(), members.iter().copied().collect::<Vec<_>>());
            prop_assert_eq!(w.count_leq(x).unwrap(), members.range(..=x).count() as u64);
            prop_assert_eq!(w.count_range(40, x), members.range(40..x.max(40)).count() as u64);
        }
    }
}
