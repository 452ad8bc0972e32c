use crate::dioph::{CircleArc, Rotation, ThetaValue};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sets::{Interval, WindowSet};

/// Margin (in units of `2^-128`) a decision at `n < end` must clear.
pub fn decision_margin(rot: &Rotation, end: u64) -> u128 {
    (end as u128)
        .saturating_mul(rot.error)
        .saturating_add(2)
        .max(rot.min_margin)
}

/// Sets the bits of `{n ∈ window : frac(nθ) ∈ arc}` in `out`.
///
/// Fails instead of guessing when some `frac(nθ)` lies within the error
/// radius of an arc endpoint.
pub fn bohr_fill(rot: &Rotation, arc: &CircleArc, window: Interval, out: &mut WindowSet) -> Result<u64> {
    if window.lo() < out.base() || window.hi() > out.end() {
        return Err(Error::WindowBounds("Bohr window outside the output window".into()));
    }
    if arc.is_full() {
        out.insert_range(window.lo(), window.hi());
        return Ok(window.len());
    }
    let margin = decision_margin(rot, window.hi());
    let base = out.base();
    let words = out.words_mut();
    let mut t = (window.lo() as u128).wrapping_mul(rot.theta);
    let mut count = 0;
    let mut n = window.lo();
    while n < window.hi() {
        let i = n - base;
        let wi = (i / 64) as usize;
        let stop = window.hi().min(n + (64 - i % 64));
        let mut word = 0u64;
        for m in n..stop {
            if arc.endpoint_distance(t) <= margin {
                return Err(Error::Precision(format!(
                    "frac({m}·θ) too close to an arc endpoint to decide at this precision"
                )));
            }
            if arc.contains(t) {
                word |= 1 << ((m - base) % 64);
            }
            t = t.wrapping_add(rot.theta);
        }
        count += word.count_ones() as u64;
        words[wi] |= word;
        n = stop;
    }
    Ok(count)
}

/// `{n ∈ window : frac(nθ) ∈ [arc_lo, arc_hi)}`, materialized on the window itself.
pub fn bohr_set(theta: &ThetaValue, arc_lo: &Rational, arc_hi: &Rational, window: Interval) -> Result<WindowSet> {
    let arc = CircleArc::from_rationals(arc_lo, arc_hi)?;
    let mut out = WindowSet::empty(window.lo(), window.len())?;
    bohr_fill(&theta.rotation(), &arc, window, &mut out)?;
    Ok(out)
}
