//! Seeded trials for the sumset coverage bounds and exact checks of the
//! density-zero criterion for exceptional sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Coin;
use crate::sets::{Interval, IntervalUnion, WindowSet};
use crate::sumset::{blocked_sumset, rep_count_closed_form, sumset_intervals, sumset_window, BlockedSet, PairSearch};

/// Two-sided 95% normal quantile used for the upper confidence limit.
pub const WILSON_Z: f64 = 1.96;

/// Allowance on top of a bound before a configuration counts as failing.
pub const BOUND_SLACK: f64 = 0.02;

/// Wilson score upper limit for a binomial rate.
pub fn wilson_upper(failures: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 1.0;
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let centre = p + z2 / (2.0 * n);
    let spread = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre + spread) / (1.0 + z2 / n)).min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trials: u64,
    pub failures: u64,
    pub empirical_rate: f64,
    pub bound: f64,
    pub wilson_upper: f64,
    /// `wilson_upper <= bound + BOUND_SLACK`.
    pub within_bound: bool,
}

impl TrialStats {
    pub fn new(trials: u64, failures: u64, bound: f64) -> Self {
        let wilson = wilson_upper(failures, trials);
        TrialStats {
            trials,
            failures,
            empirical_rate: if trials == 0 { 0.0 } else { failures as f64 / trials as f64 },
            bound,
            wilson_upper: wilson,
            within_bound: wilson <= bound + BOUND_SLACK,
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{name} = {p} outside (0, 1]")))
    }
}

/// Bernoulli subset of `[0, len)` drawn from substream `stream`.
fn bernoulli_prefix(len: u64, p: f64, seed: u64, stream: u64) -> Result<WindowSet> {
    let mut w = WindowSet::empty(0, len)?;
    let mut coin = Coin::new(seed, stream, p)?;
    for x in 0..len {
        if coin.flip() {
            w.insert(x);
        }
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasicProbaParams {
    pub i_len: u64,
    pub j_len: u64,
    pub r: u64,
    pub p: f64,
    pub q: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Trials of the coverage bound: with `K` the sums having at least `r`
/// representations, a trial fails when `|K ∖ (A + B)| > |K| e^{-rpq/2}`.
pub fn verify_basic_proba(params: &BasicProbaParams) -> Result<TrialStats> {
    let BasicProbaParams { i_len, j_len, r, p, q, trials, seed } = *params;
    if r == 0 || r > i_len.min(j_len) {
        return Err(Error::Precondition(format!("r = {r} must lie in [1, min({i_len}, {j_len})]")));
    }
    check_probability("p", p)?;
    check_probability("q", q)?;
    let (i, j) = (Interval::new(0, i_len)?, Interval::new(0, j_len)?);
    let sums = i.sum(&j);
    let k: Vec<u64> = (sums.lo()..sums.hi()).filter(|&x| rep_count_closed_form(x, &i, &j) >= r).collect();
    let bound = (-(r as f64) * p * q / 2.0).exp();
    let allowed = k.len() as f64 * bound;
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let a = bernoulli_prefix(i_len, p, seed, 2 * t)?;
            let b = bernoulli_prefix(j_len, q, seed, 2 * t + 1)?;
            let ab = sumset_window(&a, &b, sums)?;
            let missing = k.iter().filter(|&&x| !ab.contains(x)).count();
            Ok(u64::from(missing as f64 > allowed))
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(TrialStats::new(trials, failures, bound))
}

/// Failure rates of [`verify_basic_proba`] for each `r`, other parameters fixed.
pub fn basic_proba_sweep(base: &BasicProbaParams, rs: &[u64]) -> Result<Vec<TrialStats>> {
    rs.iter().map(|&r| verify_basic_proba(&BasicProbaParams { r, ..base.clone() })).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorProbaParams {
    pub m: u64,
    pub n: u64,
    pub p: f64,
    pub q: f64,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
}

/// `(pqm, 16 ε⁻² log(M/ε))` with `M = m + n - 1`.
pub fn cor_proba_hypothesis(params: &CorProbaParams) -> (f64, f64) {
    let CorProbaParams { m, n, p, q, epsilon, .. } = *params;
    let big_m = (m + n - 1) as f64;
    (p * q * m as f64, 16.0 / (epsilon * epsilon) * (big_m / epsilon).ln())
}

/// Does every prefix `[0, y)` with `lo < y <= hi` hold at least `(1-ε) y` members?
fn prefixes_covered(s: &WindowSet, lo: f64, hi: u64, epsilon: f64) -> bool {
    let mut count = 0u64;
    for y in 1..=hi {
        if s.contains(y - 1) {
            count += 1;
        }
        if y as f64 > lo && (count as f64) < (1.0 - epsilon) * y as f64 {
            return false;
        }
    }
    true
}

/// Trials of the prefix-coverage bound for `A + B` and `A + A`; refuses
/// to run when the size hypothesis fails.
pub fn verify_cor_proba(params: &CorProbaParams) -> Result<TrialStats> {
    let CorProbaParams { m, n, p, q, epsilon, trials, seed } = *params;
    if m < 2 || m > n {
        return Err(Error::Precondition(format!("need 2 <= m <= n, got m = {m}, n = {n}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Precondition(format!("epsilon = {epsilon} outside (0, 1)")));
    }
    check_probability("p", p)?;
    check_probability("q", q)?;
    let (lhs, rhs) = cor_proba_hypothesis(params);
    if lhs < rhs {
        return Err(Error::HypothesisUnmet(format!("pqm = {lhs:.1} < 16 eps^-2 log(M/eps) = {rhs:.1}")));
    }
    let (i, j) = (Interval::new(0, m)?, Interval::new(0, n)?);
    let floor = epsilon * m as f64;
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<u64> {
            let a = bernoulli_prefix(m, p, seed, 2 * t)?;
            let b = bernoulli_prefix(n, q, seed, 2 * t + 1)?;
            let ab = sumset_window(&a, &b, i.sum(&j))?;
            let aa = sumset_window(&a, &a, i.sum(&i))?;
            let ok = prefixes_covered(&ab, floor, m + n - 1, epsilon) && prefixes_covered(&aa, floor, 2 * m - 1, epsilon);
            Ok(u64::from(!ok))
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(TrialStats::new(trials, failures, epsilon))
}

/// Worst prefix ratio of one exceptional set against one `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCheck {
    pub epsilon: f64,
    /// `sup_{z ≥ ε x_n} |X_n ∩ (s, s + z]| / z`.
    pub worst_x: f64,
    /// Same for `Y_n`; absent for the first block.
    pub worst_y: Option<f64>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockExceptions {
    /// 1-based block index.
    pub n: usize,
    pub block: (u64, u64),
    /// `|2I_n ∖ 2A_n|`.
    pub x_count: u64,
    /// `|(I_{n-1} + I_n) ∖ (A_{n-1} + A_n)|`.
    pub y_count: Option<u64>,
    pub checks: Vec<EpsilonCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalDensity {
    pub x: u64,
    pub count: u64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dens0Report {
    pub epsilons: Vec<f64>,
    pub blocks: Vec<BlockExceptions>,
    /// Finite densities of `2I ∖ 2A` at the checkpoints.
    pub checkpoints: Vec<ExceptionalDensity>,
    pub final_density: f64,
    /// Per `ε`: first block from which every later block satisfies the hypothesis.
    pub settled_from: Vec<Option<usize>>,
}

/// Sums in `window` with no witness from blocks `j` and `k`.
fn missing_sums(search: &PairSearch<'_>, j: usize, k: usize, window: Interval) -> Vec<u64> {
    const CHUNK_WORDS: u64 = 1 << 12;
    let words = window.len().div_ceil(64);
    (0..words.div_ceil(CHUNK_WORDS))
        .into_par_iter()
        .flat_map_iter(|c| {
            (c * CHUNK_WORDS..((c + 1) * CHUNK_WORDS).min(words)).flat_map(move |w| {
                let x0 = window.lo() + w * 64;
                let n = (window.hi() - x0).min(64);
                let need = if n == 64 { !0 } else { (1u64 << n) - 1 };
                let mut gaps = need & !search.pair_cover(j, k, x0, need);
                std::iter::from_fn(move || {
                    (gaps != 0).then(|| {
                        let i = gaps.trailing_zeros() as u64;
                        gaps &= gaps - 1;
                        x0 + i
                    })
                })
            })
        })
        .collect()
}

/// `sup_{z ≥ z0} |{m ∈ missing : start < m ≤ start + z}| / z`, exactly.
fn worst_prefix_ratio(missing: &[u64], start: u64, z0: u64, z_max: u64) -> f64 {
    let z0 = z0.clamp(1, z_max.max(1));
    let mut rank = 0u64;
    let mut at_z0 = 0u64;
    let mut worst = 0.0f64;
    for &m in missing {
        if m <= start {
            continue;
        }
        rank += 1;
        let z = m - start;
        if z <= z0 {
            at_z0 = rank;
        } else if z <= z_max {
            worst = worst.max(rank as f64 / z as f64);
        }
    }
    worst.max(at_z0 as f64 / z0 as f64)
}

/// Exceptional sets of a blocked set whose blocks are `A_n ⊆ I_n`, with
/// `I_n` the block spans.
///
/// Every block contributes `X_n = 2I_n ∖ 2A_n` and (from the second block
/// on) `Y_n = (I_{n-1} + I_n) ∖ (A_{n-1} + A_n)`; both are computed exactly.
/// `checkpoints` must lie below `2 · max(A) + 1`.
pub fn verify_dens0_hypothesis(set: &BlockedSet, epsilons: &[f64], checkpoints: &[u64], budget: u64) -> Result<Dens0Report> {
    let blocks = set.blocks();
    if blocks.is_empty() {
        return Err(Error::Precondition("no blocks".into()));
    }
    if epsilons.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::Precondition("epsilons must lie in (0, 1)".into()));
    }
    let end = set.bits().end();
    let needed = 2 * end;
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    let search = PairSearch::new(set);
    let mut out = Vec::with_capacity(blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        let (xn, yn) = (b.span.lo(), b.span.last());
        let two = b.span.sum(&b.span);
        let x_missing = missing_sums(&search, i, i, two);
        let y_missing = (i > 0).then(|| {
            let w = blocks[i - 1].span.sum(&b.span);
            (w, missing_sums(&search, i - 1, i, w))
        });
        let checks = epsilons
            .iter()
            .map(|&eps| {
                let z0 = (eps * xn as f64).ceil() as u64;
                let worst_x = worst_prefix_ratio(&x_missing, two.lo(), z0, two.last() - two.lo());
                let worst_y = y_missing.as_ref().map(|(w, m)| worst_prefix_ratio(m, w.lo(), z0, w.last() - w.lo()));
                let holds = worst_x <= eps && worst_y.is_none_or(|v| v <= eps);
                EpsilonCheck { epsilon: eps, worst_x, worst_y, holds }
            })
            .collect();
        out.push(BlockExceptions {
            n: i + 1,
            block: (xn, yn),
            x_count: x_missing.len() as u64,
            y_count: y_missing.as_ref().map(|(_, m)| m.len() as u64),
            checks,
        });
    }
    let settled_from = (0..epsilons.len())
        .map(|e| {
            let bad = out.iter().rposition(|b| !b.checks[e].holds);
            match bad {
                None => Some(1),
                Some(i) if i + 1 < out.len() => Some(i + 2),
                Some(_) => None,
            }
        })
        .collect();

    let carrier = IntervalUnion::normalize(blocks.iter().map(|b| b.span));
    let two_i = sumset_intervals(&carrier, &carrier);
    let top = checkpoints.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    if top > 0 {
        let two_a = blocked_sumset(set, Interval::new(0, top + 1)?)?;
        for &x in checkpoints {
            let count = two_i.count_leq(x) - two_a.count_leq(x)?;
            rows.push(ExceptionalDensity { x, count, density: count as f64 / x as f64 });
        }
    }
    let final_density = rows.last().map_or(0.0, |r| r.density);
    Ok(Dens0Report { epsilons: epsilons.to_vec(), blocks: out, checkpoints: rows, final_density, settled_from })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::{thinned_blocks, BernoulliSpec, PSchedule};

    #[test]
    fn wilson_limits() {
        assert!((wilson_upper(0, 2000) - 0.00192).abs() < 1e-4);
        let w = wilson_upper(100, 1000);
        assert!(w > 0.1 && (w - 0.1203).abs() < 1e-3, "{w}");
        assert_eq!(wilson_upper(0, 0), 1.0);
    }

    #[test]
    fn full_sets_never_fail() {
        let base = BasicProbaParams { i_len: 60, j_len: 80, r: 10, p: 1.0, q: 1.0, trials: 20, seed: 1 };
        assert_eq!(verify_basic_proba(&base).unwrap().failures, 0);
        let cor = CorProbaParams { m: 4096, n: 4096, p: 1.0, q: 1.0, epsilon: 0.5, trials: 3, seed: 1 };
        assert_eq!(verify_cor_proba(&cor).unwrap().failures, 0);
    }

    #[test]
    fn preconditions_are_gated() {
        let bad_r = BasicProbaParams { i_len: 5, j_len: 80, r: 10, p: 0.5, q: 0.5, trials: 1, seed: 1 };
        assert!(matches!(verify_basic_proba(&bad_r), Err(Error::Precondition(_))));
        let small = CorProbaParams { m: 100, n: 100, p: 0.9, q: 0.9, epsilon: 0.1, trials: 1, seed: 1 };
        assert!(matches!(verify_cor_proba(&small), Err(Error::HypothesisUnmet(_))));
    }

    #[test]
    fn weak_bound_is_vacuous() {
        let s = verify_basic_proba(&BasicProbaParams { i_len: 8, j_len: 8, r: 1, p: 0.05, q: 0.05, trials: 200, seed: 4 })
            .unwrap();
        assert!(s.bound > 0.99 && s.within_bound);
    }

    #[test]
    fn seeded_trials_repeat() {
        let p = BasicProbaParams { i_len: 100, j_len: 120, r: 5, p: 0.3, q: 0.4, trials: 50, seed: 9 };
        assert_eq!(verify_basic_proba(&p).unwrap(), verify_basic_proba(&p).unwrap());
    }

    #[test]
    fn prefix_ratio_is_exact() {
        // Members at offsets 1, 2, 10 past start 100.
        let m = [100, 101, 102, 110];
        assert_eq!(worst_prefix_ratio(&m, 100, 1, 50), 1.0);
        assert_eq!(worst_prefix_ratio(&m, 100, 4, 50), 0.5);
        assert!((worst_prefix_ratio(&m, 100, 20, 50) - 0.15).abs() < 1e-12);
    }

    #[test]
    fn unthinned_blocks_have_no_exceptions() {
        let blocks = vec![Interval::new(5, 11).unwrap(), Interval::new(50, 101).unwrap(), Interval::new(500, 1001).unwrap()];
        let run = thinned_blocks(blocks, &BernoulliSpec { schedule: PSchedule::Constant { p: 1.0 }, seed: 0 }).unwrap();
        let r = verify_dens0_hypothesis(&run.thinned, &[0.1], &[1000, 2000], u64::MAX).unwrap();
        assert!(r.blocks.iter().all(|b| b.x_count == 0 && b.y_count.unwrap_or(0) == 0));
        assert!(r.checkpoints.iter().all(|c| c.count == 0));
        assert_eq!(r.settled_from, vec![Some(1)]);
    }

    #[test]
    fn exceptional_counts_match_brute_force() {
        let blocks = vec![Interval::new(3, 9).unwrap(), Interval::new(40, 90).unwrap()];
        let run = thinned_blocks(blocks.clone(), &BernoulliSpec { schedule: PSchedule::Constant { p: 0.3 }, seed: 5 }).unwrap();
        let a: Vec<u64> = run.thinned.bits().iter().collect();
        let r = verify_dens0_hypothesis(&run.thinned, &[0.5], &[100, 178], u64::MAX).unwrap();
        let in_block = |x: u64, b: &Interval| b.contains(x);
        let sums = |p: &Interval, q: &Interval| -> Vec<u64> {
            let mut v: Vec<u64> = a
                .iter()
                .flat_map(|&x| a.iter().map(move |&y| (x, y)))
                .filter(|(x, y)| in_block(*x, p) && in_block(*y, q))
                .map(|(x, y)| x + y)
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let x2 = sums(&blocks[1], &blocks[1]);
        let expected_x = (80..179).filter(|s| x2.binary_search(s).is_err()).count() as u64;
        assert_eq!(r.blocks[1].x_count, expected_x);
        let y = sums(&blocks[0], &blocks[1]);
        let expected_y = (43..98).filter(|s| y.binary_search(s).is_err()).count() as u64;
        assert_eq!(r.blocks[1].y_count, Some(expected_y));
        let all: Vec<u64> = sums(&Interval::new(0, 90).unwrap(), &Interval::new(0, 90).unwrap());
        let carrier = IntervalUnion::normalize(blocks.clone());
        let two_i = sumset_intervals(&carrier, &carrier);
        let expected = (1..=178).filter(|&s| two_i.contains(s) && all.binary_search(&s).is_err()).count() as u64;
        assert_eq!(r.checkpoints[1].count, expected);
    }
}
