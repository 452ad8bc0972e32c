use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Arc `[lo, hi)` of the circle `R/Z` in 128-bit fixed point.
///
/// A point `t` (the fraction `t / 2^128`) lies on the arc iff
/// `(t - start) mod 2^128 < width`; `width == None` is the whole circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CircleArc {
    start: u128,
    width: Option<u128>,
}

impl CircleArc {
    pub const FULL: CircleArc = CircleArc { start: 0, width: None };

    pub fn from_rationals(lo: &Rational, hi: &Rational) -> Result<Self> {
        let zero = rational::rat(0, 1);
        let one = rational::rat(1, 1);
        if *lo < zero || *lo >= one || *hi <= *lo || *hi > one {
            return Err(Error::InvalidParameter(format!(
                "arc [{}, {}) is not inside [0, 1)",
                rational::format(lo),
                rational::format(hi)
            )));
        }
        let start = rational::to_fixed128(lo).expect("lo in [0, 1)");
        if *hi == one {
            if start == 0 {
                return Ok(CircleArc::FULL);
            }
            return Ok(CircleArc { start, width: Some(0u128.wrapping_sub(start)) });
        }
        let end = rational::to_fixed128(hi).expect("hi in (0, 1)");
        Ok(CircleArc { start, width: Some(end - start) })
    }

    pub fn is_full(&self) -> bool {
        self.width.is_none()
    }

    pub fn contains(&self, t: u128) -> bool {
        match self.width {
            None => true,
            Some(w) => t.wrapping_sub(self.start) < w,
        }
    }

    /// Arc containing every `s + t` with `s` on `self` and `t` on `other`.
    pub fn sum(&self, other: &CircleArc) -> CircleArc {
        match (self.width, other.width) {
            (Some(w1), Some(w2)) => match w1.checked_add(w2 - 1) {
                Some(w) => CircleArc { start: self.start.wrapping_add(other.start), width: Some(w) },
                None => CircleArc::FULL,
            },
            _ => CircleArc::FULL,
        }
    }

    /// Circular distance from `t` to the nearer endpoint; `u128::MAX` for the full circle.
    pub fn endpoint_distance(&self, t: u128) -> u128 {
        let circ = |a: u128, b: u128| {
            let d = a.wrapping_sub(b);
            d.min(b.wrapping_sub(a))
        };
        match self.width {
            None => u128::MAX,
            Some(w) => circ(t, self.start).min(circ(t, self.start.wrapping_add(w))),
        }
    }

    /// Arc length as a fraction of the circle.
    pub fn measure(&self) -> f64 {
        match self.width {
            None => 1.0,
            Some(w) => w as f64 / 2f64.powi(128),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn half_arc_membership() {
        let a = CircleArc::from_rationals(&rat(0, 1), &rat(1, 2)).unwrap();
        assert!(a.contains(0));
        assert!(a.contains((1u128 << 127) - 1));
        assert!(!a.contains(1u128 << 127));
        assert!((a.measure() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sums_of_arcs_wrap_to_full() {
        let a = CircleArc::from_rationals(&rat(0, 1), &rat(1, 2)).unwrap();
        let b = CircleArc::from_rationals(&rat(0, 1), &rat(3, 5)).unwrap();
        assert!(a.sum(&b).is_full());
        let c = CircleArc::from_rationals(&rat(0, 1), &rat(1, 5)).unwrap();
        assert!((a.sum(&c).measure() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn wrapping_arc() {
        let a = CircleArc::from_rationals(&rat(9, 10), &rat(1, 1)).unwrap();
        assert!(!a.is_full());
        assert!(a.contains(u128::MAX));
        assert!(!a.contains(0));
        assert!(CircleArc::from_rationals(&rat(1, 2), &rat(1, 2)).is_err());
    }
}
