use serde::Serialize;

use crate::dioph::{bohr_fill, CircleArc, ThetaValue};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sets::{Interval, WindowSet};
use crate::sumset::{candidate_range, BitFrame};

/// Constant `C` in the window gates `|I_i| ≥ C η⁻³` and `y ≥ C η⁻⁴`.
/// Frozen from the calibration sweep in `tests/calibration.rs`: over the
/// swept rotations, arcs and `η`, 8 still admits failing windows and 16 does not.
pub const DIOPHSUM_CONSTANT: f64 = 16.0;

/// Largest frame (in bits) the check will allocate.
pub const DIOPHSUM_BUDGET: u64 = 1 << 28;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiophSumReport {
    pub eta: f64,
    pub y: u64,
    pub constant: f64,
    pub hypothesis_met: bool,
    /// `ceil(η⁻²)`.
    pub threshold: u64,
    /// `|S ∩ [min(I₁+I₂), min(I₁+I₂) + y]|`.
    pub checked: u64,
    pub exceptions: u64,
    pub exception_fraction: f64,
    /// Elements of `B₁ + B₂` outside `S`.
    pub inclusion_violations: u64,
    /// Present only when the hypothesis is met.
    pub passed: Option<bool>,
}

pub struct DiophSumInput<'a> {
    pub theta: &'a ThetaValue,
    pub arc1: (&'a Rational, &'a Rational),
    pub arc2: (&'a Rational, &'a Rational),
    pub window1: Interval,
    pub window2: Interval,
    pub eta: f64,
    pub y: u64,
    pub constant: f64,
}

/// Restricted representation counts of the Bohr sets `B₁ ⊆ I₁`, `B₂ ⊆ I₂`
/// over the Bohr set `S ⊆ I₁ + I₂` cut out by `arc1 + arc2`.
pub fn diophsum_repcheck(input: &DiophSumInput) -> Result<DiophSumReport> {
    let DiophSumInput { theta, arc1, arc2, window1: w1, window2: w2, eta, y, constant } = *input;
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("eta = {eta} not in (0, 1)")));
    }
    let sum = w1.sum(&w2);
    let frame_len = sum.hi();
    if frame_len > DIOPHSUM_BUDGET {
        return Err(Error::Budget { needed: frame_len, budget: DIOPHSUM_BUDGET });
    }
    let rot = theta.rotation();
    let a1 = CircleArc::from_rationals(arc1.0, arc1.1)?;
    let a2 = CircleArc::from_rationals(arc2.0, arc2.1)?;
    let arc_sum = a1.sum(&a2);

    let mut b1 = WindowSet::empty(0, frame_len)?;
    bohr_fill(&rot, &a1, w1, &mut b1)?;
    let mut b2 = WindowSet::empty(0, frame_len)?;
    bohr_fill(&rot, &a2, w2, &mut b2)?;
    let both_words: Vec<u64> = b1.words().iter().zip(b2.words()).map(|(x, y)| x & y).collect();
    let both = WindowSet::from_words(0, frame_len, both_words)?;
    let (f1, f2, f12) = (BitFrame::new(&b1), BitFrame::new(&b2), BitFrame::new(&both));

    let hypothesis_met = (w1.len().min(w2.len()) as f64) >= constant * eta.powi(-3)
        && (y as f64) >= constant * eta.powi(-4);
    let threshold = (eta.powi(-2) - 1e-9).ceil() as u64;

    let top = (sum.lo() + y).min(sum.last());
    let (mut checked, mut exceptions, mut violations) = (0u64, 0u64, 0u64);
    for x in sum.lo()..sum.hi() {
        let t = (x as u128).wrapping_mul(rot.theta);
        let in_s = arc_sum.contains(t);
        let (lo, hi) = candidate_range(x, w1.lo(), w1.hi(), w2.lo(), w2.hi());
        if !in_s {
            if f1.any_pair(&f2, x, lo, hi) {
                violations += 1;
            }
            continue;
        }
        if x > top {
            continue;
        }
        checked += 1;
        let ordered = f1.count_pairs(&f2, x, lo, hi);
        let diag = u64::from(x % 2 == 0 && (lo..hi).contains(&(x / 2)) && b1.contains(x / 2) && b2.contains(x / 2));
        let (slo, shi) = candidate_range(x, lo, hi, w1.lo(), w1.hi());
        let (slo, shi) = candidate_range(x, slo.max(w2.lo()), shi.min(w2.hi()), w2.lo(), w2.hi());
        let sym = if slo < shi { f12.count_pairs(&f12, x, slo, shi) } else { 0 };
        let sym_diag = u64::from(x % 2 == 0 && (slo..shi).contains(&(x / 2)) && both.contains(x / 2));
        let restricted = ordered - diag - (sym - sym_diag) / 2;
        if restricted < threshold {
            exceptions += 1;
        }
    }
    let fraction = if checked == 0 { 0.0 } else { exceptions as f64 / checked as f64 };
    let allowed = eta * y as f64;
    Ok(DiophSumReport {
        eta,
        y,
        constant,
        hypothesis_met,
        threshold,
        checked,
        exceptions,
        exception_fraction: fraction,
        inclusion_violations: violations,
        passed: hypothesis_met.then_some(exceptions as f64 <= allowed && violations == 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use std::collections::BTreeSet;

    fn input<'a>(theta: &'a ThetaValue, lo: &'a Rational, hi: &'a Rational, len: u64, eta: f64, y: u64) -> DiophSumInput<'a> {
        DiophSumInput {
            theta,
            arc1: (lo, hi),
            arc2: (lo, hi),
            window1: Interval::closed(1, len).unwrap(),
            window2: Interval::closed(1, len).unwrap(),
            eta,
            y,
            constant: DIOPHSUM_CONSTANT,
        }
    }

    #[test]
    fn restricted_counts_match_brute_force() {
        let g = ThetaValue::golden();
        let (lo, hi) = (rat(0, 1), rat(2, 5));
        let w1 = Interval::closed(1, 60).unwrap();
        let w2 = Interval::closed(30, 90).unwrap();
        let inp = DiophSumInput { window1: w1, window2: w2, ..input(&g, &lo, &hi, 60, 0.5, 400) };
        let rep = diophsum_repcheck(&inp).unwrap();
        let th = g.to_f64();
        let frac = |n: u64| (n as f64 * th).fract();
        let b1: BTreeSet<u64> = (1..=60).filter(|&n| frac(n) < 0.4).collect();
        let b2: BTreeSet<u64> = (30..=90).filter(|&n| frac(n) < 0.4).collect();
        let (mut checked, mut exc) = (0, 0);
        for x in 31..=150u64 {
            let f = frac(x);
            if f >= 0.8 {
                continue;
            }
            checked += 1;
            let mut pairs = BTreeSet::new();
            for &i in &b1 {
                if i < x && b2.contains(&(x - i)) && 2 * i != x {
                    pairs.insert((i.min(x - i), i.max(x - i)));
                }
            }
            if (pairs.len() as u64) < rep.threshold {
                exc += 1;
            }
        }
        assert_eq!((rep.checked, rep.exceptions), (checked, exc));
        assert_eq!(rep.inclusion_violations, 0);
    }

    #[test]
    fn small_eta_leaves_hypothesis_unmet() {
        let g = ThetaValue::golden();
        let (lo, hi) = (rat(0, 1), rat(2, 5));
        let rep = diophsum_repcheck(&input(&g, &lo, &hi, 2000, 0.05, 2000)).unwrap();
        assert!(!rep.hypothesis_met);
        assert_eq!(rep.passed, None);
    }
}
