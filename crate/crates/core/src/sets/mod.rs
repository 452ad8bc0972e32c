//! Interval unions, windowed bitsets and growth schedules.

mod interval;
mod schedule;
mod window;

pub use interval::{Interval, IntervalUnion};
pub use schedule::{GrowthLaw, GrowthSchedule};
pub use window::WindowSet;
pub(crate) use window::mask_tail;

use crate::error::Result;

/// Anything that can report `|S ∩ [1, x]|`.
pub trait CountingSet {
    fn count_leq(&self, x: u64) -> Result<u64>;
}

impl CountingSet for IntervalUnion {
    fn count_leq(&self, x: u64) -> Result<u64> {
        Ok(IntervalUnion::count_leq(self, x))
    }
}

impl CountingSet for WindowSet {
    fn count_leq(&self, x: u64) -> Result<u64> {
        WindowSet::count_leq(self, x)
    }
}

/// `|S ∩ [1, x]| / x`.
pub fn finite_density<S: CountingSet + ?Sized>(s: &S, x: u64) -> Result<f64> {
    if x == 0 {
        return Err(crate::error::Error::Precondition("density at x = 0".into()));
    }
    Ok(s.count_leq(x)? as f64 / x as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_density_example() {
        let s = IntervalUnion::from_pairs(&[(50, 101)]).unwrap();
        assert!((finite_density(&s, 100).unwrap() - 0.51).abs() < 1e-12);
    }
}
