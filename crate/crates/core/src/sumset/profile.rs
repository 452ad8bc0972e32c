use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{CountingSet, Interval, IntervalUnion, WindowSet};
use crate::sumset::{blocked_sumset, sumset_intervals, sumset_window, BlockedSet};

/// Slack reported with every estimate: the spread a finite-depth run can
/// show against its limit values at the depths this crate runs.
pub const ESTIMATOR_SLACK: f64 = 0.02;

/// Below this many checkpoints in the combined tails the estimate is flagged.
pub const MIN_TAIL_CHECKPOINTS: usize = 4;

/// Where densities are sampled: `lower` where the set is thinnest,
/// `upper` where it is thickest, and likewise for the sumset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointPlan {
    pub lower: Vec<u64>,
    pub upper: Vec<u64>,
    pub sumset_lower: Vec<u64>,
    pub sumset_upper: Vec<u64>,
}

impl CheckpointPlan {
    /// Sumset checkpoints are the set's lower checkpoints and the set's upper
    /// checkpoints together with their doubles, kept below `sumset_horizon`
    /// (the point up to which the truncated sumset is exact).
    pub fn new(lower: Vec<u64>, upper: Vec<u64>, sumset_horizon: u64) -> Self {
        let sumset_lower: Vec<u64> = lower.iter().copied().filter(|&c| c < sumset_horizon).collect();
        let mut sumset_upper: Vec<u64> = upper
            .iter()
            .flat_map(|&c| [c, c.saturating_mul(2)])
            .filter(|&c| c < sumset_horizon)
            .collect();
        sumset_upper.sort_unstable();
        sumset_upper.dedup();
        CheckpointPlan { lower, upper, sumset_lower, sumset_upper }
    }

    /// Largest sumset checkpoint.
    pub fn sumset_extent(&self) -> u64 {
        self.sumset_lower.iter().chain(&self.sumset_upper).copied().max().unwrap_or(0)
    }

    pub fn extent(&self) -> u64 {
        self.lower.iter().chain(&self.upper).copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileEstimate {
    #[serde(rename = "ldens_A")]
    pub ldens_a: f64,
    #[serde(rename = "udens_A")]
    pub udens_a: f64,
    #[serde(rename = "ldens_2A")]
    pub ldens_2a: f64,
    #[serde(rename = "udens_2A")]
    pub udens_2a: f64,
    pub low_depth: bool,
    pub slack: f64,
}

impl ProfileEstimate {
    pub fn as_array(&self) -> [f64; 4] {
        [self.ldens_a, self.udens_a, self.ldens_2a, self.udens_2a]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointDensity {
    pub set: String,
    pub side: String,
    pub x: u64,
    pub count: u64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRun {
    pub estimate: ProfileEstimate,
    pub checkpoints: Vec<CheckpointDensity>,
}

fn tail(v: &[u64]) -> &[u64] {
    &v[v.len() - v.len().div_ceil(2)..]
}

fn sample(
    s: &dyn CountingSet,
    cps: &[u64],
    set: &str,
    side: &str,
    rows: &mut Vec<CheckpointDensity>,
) -> Result<Vec<f64>> {
    cps.iter()
        .map(|&x| {
            if x == 0 {
                return Err(Error::Precondition("checkpoint 0".into()));
            }
            let count = s.count_leq(x)?;
            let density = count as f64 / x as f64;
            rows.push(CheckpointDensity { set: set.into(), side: side.into(), x, count, density });
            Ok(density)
        })
        .collect()
}

/// Finite-depth estimate of the four densities from truncations at the plan's checkpoints.
///
/// Lower densities are the minimum over the later half of the lower
/// checkpoints, upper densities the maximum over the later half of the upper
/// ones.
pub fn profile_estimate(set: &dyn CountingSet, sumset: &dyn CountingSet, plan: &CheckpointPlan) -> Result<ProfileRun> {
    for (name, v) in [
        ("lower", &plan.lower),
        ("upper", &plan.upper),
        ("sumset lower", &plan.sumset_lower),
        ("sumset upper", &plan.sumset_upper),
    ] {
        if v.is_empty() {
            return Err(Error::Precondition(format!("no {name} checkpoints")));
        }
    }
    let mut rows = Vec::new();
    let min = |v: Vec<f64>| v.into_iter().fold(f64::INFINITY, f64::min);
    let max = |v: Vec<f64>| v.into_iter().fold(f64::NEG_INFINITY, f64::max);
    let ldens_a = min(sample(set, tail(&plan.lower), "A", "lower", &mut rows)?);
    let udens_a = max(sample(set, tail(&plan.upper), "A", "upper", &mut rows)?);
    let ldens_2a = min(sample(sumset, tail(&plan.sumset_lower), "2A", "lower", &mut rows)?);
    let udens_2a = max(sample(sumset, tail(&plan.sumset_upper), "2A", "upper", &mut rows)?);
    let low_depth = tail(&plan.lower).len() + tail(&plan.upper).len() < MIN_TAIL_CHECKPOINTS;
    Ok(ProfileRun {
        estimate: ProfileEstimate { ldens_a, udens_a, ldens_2a, udens_2a, low_depth, slack: ESTIMATOR_SLACK },
        checkpoints: rows,
    })
}

/// A set in one of the representations the estimator understands.
#[derive(Clone, Debug)]
pub enum Subject {
    Intervals(IntervalUnion),
    Window(WindowSet),
    Blocked(BlockedSet),
}

impl Subject {
    pub fn counting(&self) -> &dyn CountingSet {
        match self {
            Subject::Intervals(u) => u,
            Subject::Window(w) => w,
            Subject::Blocked(b) => b.bits(),
        }
    }
}

/// Computes the sumset truncation the plan needs and runs [`profile_estimate`].
///
/// `budget` caps the number of bits of an explicit sumset window.
pub fn estimate_subject(subject: &Subject, plan: &CheckpointPlan, budget: u64) -> Result<ProfileRun> {
    let extent = plan.sumset_extent();
    let bits_needed = extent + 1;
    let check_budget = || {
        if bits_needed > budget {
            Err(Error::Budget { needed: bits_needed, budget })
        } else {
            Ok(())
        }
    };
    match subject {
        Subject::Intervals(u) => {
            let two = sumset_intervals(u, u);
            profile_estimate(u, &two, plan)
        }
        Subject::Window(w) => {
            check_budget()?;
            let lo = 2 * w.base();
            if lo > extent {
                let empty = IntervalUnion::empty();
                return profile_estimate(w, &empty, plan);
            }
            let two = sumset_window(w, w, Interval::new(lo, extent + 1)?)?;
            profile_estimate(w, &two, plan)
        }
        Subject::Blocked(b) => {
            check_budget()?;
            let two = blocked_sumset(b, Interval::new(0, extent + 1)?)?;
            profile_estimate(b.bits(), &two, plan)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_is_later_half() {
        assert_eq!(tail(&[1, 2, 3, 4, 5]), &[3, 4, 5]);
        assert_eq!(tail(&[1, 2]), &[2]);
    }

    #[test]
    fn empty_set_has_zero_profile() {
        let plan = CheckpointPlan::new(vec![10, 100], vec![50, 500], u64::MAX);
        let e = IntervalUnion::empty();
        let run = profile_estimate(&e, &e, &plan).unwrap();
        assert_eq!(run.estimate.as_array(), [0.0; 4]);
    }

    #[test]
    fn full_interval_from_zero_is_exactly_one() {
        let n = 1_000_000;
        let full = Subject::Intervals(IntervalUnion::from_pairs(&[(0, n + 1)]).unwrap());
        let plan = CheckpointPlan::new(vec![10, 1000, n], vec![100, 10_000, n / 2], n + 1);
        let run = estimate_subject(&full, &plan, 0).unwrap();
        assert_eq!(run.estimate.as_array(), [1.0; 4]);
    }

    #[test]
    fn budget_is_enforced_for_windows() {
        let w = IntervalUnion::from_pairs(&[(1, 100)]).unwrap().materialize(0, 100).unwrap();
        let plan = CheckpointPlan::new(vec![50, 99], vec![60, 99], 101);
        assert!(matches!(
            estimate_subject(&Subject::Window(w.clone()), &plan, 64),
            Err(Error::Budget { .. })
        ));
        assert!(estimate_subject(&Subject::Window(w), &plan, 1 << 20).is_ok());
    }
}
