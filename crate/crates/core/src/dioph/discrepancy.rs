use num_traits::Signed;
use serde::Serialize;

use crate::dioph::{bohr_set, norm_dist, ThetaValue};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::sets::Interval;

/// Multiplier applied to the Erdős–Turán expression before comparing it with
/// an empirical discrepancy. Frozen from the calibration sweep in
/// `tests/calibration.rs`, where 1 already bounds every measured case.
pub const ERDOS_TURAN_MULTIPLIER: f64 = 1.0;

/// `1/m + (1/n) Σ_{k ≤ m} 1 / (k ‖kθ‖)`.
pub fn erdos_turan_bound(theta: &ThetaValue, n: u64, m: u64) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::Precondition("n and m must be at least 1".into()));
    }
    let mut sum = 0.0;
    for k in 1..=m {
        sum += 1.0 / (k as f64 * norm_dist(k, theta)?);
    }
    Ok(1.0 / m as f64 + sum / n as f64)
}

pub fn default_m(n: u64) -> u64 {
    n.isqrt().max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub n: u64,
    pub count: u64,
    pub arc_length: f64,
    /// `|count / n - arc length|`.
    pub empirical: f64,
    pub bound: f64,
    pub m_used: u64,
    pub multiplier: f64,
    pub within_bound: bool,
}

pub fn empirical_discrepancy(
    theta: &ThetaValue,
    arc_lo: &Rational,
    arc_hi: &Rational,
    window: Interval,
    m: Option<u64>,
) -> Result<DiscrepancyReport> {
    let n = window.len();
    let m_used = m.unwrap_or_else(|| default_m(n));
    let count = bohr_set(theta, arc_lo, arc_hi, window)?.count_ones();
    let length = arc_hi - arc_lo;
    let exact = (Rational::new(count.into(), n.into()) - &length).abs();
    let empirical = rational::to_f64(&exact);
    let bound = erdos_turan_bound(theta, n, m_used)?;
    Ok(DiscrepancyReport {
        n,
        count,
        arc_length: rational::to_f64(&length),
        empirical,
        bound,
        m_used,
        multiplier: ERDOS_TURAN_MULTIPLIER,
        within_bound: empirical <= ERDOS_TURAN_MULTIPLIER * bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub reports: Vec<DiscrepancyReport>,
    /// Least-squares slope of `log(discrepancy)` against `log(n)`.
    pub exponent: f64,
}

/// Worst empirical discrepancy over the prefixes `⟦1, k⟧` of `⟦1, n⟧` that
/// are multiples of `n / 10`. A single prefix can land on a zero of the
/// error term, so the fit uses this maximum instead.
fn prefix_discrepancy(theta: &ThetaValue, arc_lo: &Rational, arc_hi: &Rational, n: u64) -> Result<f64> {
    let set = bohr_set(theta, arc_lo, arc_hi, Interval::closed(1, n)?)?;
    let length = rational::to_f64(&(arc_hi - arc_lo));
    let step = (n / 10).max(1);
    let mut worst: f64 = 0.0;
    let mut k = step;
    while k <= n {
        let c = set.count_range(1, k + 1);
        worst = worst.max((c as f64 / k as f64 - length).abs());
        k += step;
    }
    Ok(worst)
}

/// Fits the decay exponent of the discrepancy of `⟦1, n⟧` over the given sizes.
pub fn discrepancy_decay(theta: &ThetaValue, arc_lo: &Rational, arc_hi: &Rational, ns: &[u64]) -> Result<DecayReport> {
    if ns.len() < 2 {
        return Err(Error::Precondition("need at least two window sizes".into()));
    }
    let mut reports = Vec::with_capacity(ns.len());
    let mut pts = Vec::with_capacity(ns.len());
    for &n in ns {
        reports.push(empirical_discrepancy(theta, arc_lo, arc_hi, Interval::closed(1, n)?, None)?);
        let d = prefix_discrepancy(theta, arc_lo, arc_hi, n)?;
        if d <= 0.0 {
            return Err(Error::Precondition(format!("zero discrepancy at n = {n}; no decay to fit")));
        }
        pts.push(((n as f64).ln(), d.ln()));
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(DecayReport { reports, exponent: sxy / sxx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn golden_small_bound() {
        let b = erdos_turan_bound(&ThetaValue::golden(), 1000, 3).unwrap();
        assert!((b - 0.3404).abs() < 5e-5, "{b}");
    }

    #[test]
    fn single_term_bound_is_dominated_by_one() {
        let g = ThetaValue::golden();
        let n = 1_000_000_000;
        let b = erdos_turan_bound(&g, n, 1).unwrap();
        let expect = 1.0 + 1.0 / (n as f64 * norm_dist(1, &g).unwrap());
        assert!((b - expect).abs() < 1e-15);
    }

    #[test]
    fn full_arc_has_zero_discrepancy() {
        let r = empirical_discrepancy(&ThetaValue::golden(), &rat(0, 1), &rat(1, 1), Interval::closed(1, 5000).unwrap(), None)
            .unwrap();
        assert_eq!(r.empirical, 0.0);
    }
}
