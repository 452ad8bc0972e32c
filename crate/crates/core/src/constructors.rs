//! Set families: lacunary interval unions, Bohr sets, Bernoulli subsets and
//! the composite Bohr–Bernoulli construction.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dioph::{bohr_fill, CircleArc, ThetaValue};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::rng::Coin;
use crate::sets::{GrowthSchedule, Interval, IntervalUnion, WindowSet};
use crate::sumset::{Block, BlockedSet};

pub use crate::dioph::bohr_set;

/// Blocks `⟦x_n, y_n⟧`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LacunarySpec {
    pub xs: Vec<u64>,
    pub ys: Vec<u64>,
}

impl LacunarySpec {
    pub fn new(xs: GrowthSchedule, ys: GrowthSchedule) -> Result<Self> {
        LacunarySpec::from_vecs(xs.checkpoints().to_vec(), ys.checkpoints().to_vec())
    }

    /// Requires `x_n < y_n` and `y_n + 1 < x_{n+1}`, so the blocks stay separate.
    pub fn from_vecs(xs: Vec<u64>, ys: Vec<u64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidSchedule(format!("{} starts but {} ends", xs.len(), ys.len())));
        }
        for n in 0..xs.len() {
            if xs[n] >= ys[n] || (n + 1 < xs.len() && ys[n].saturating_add(1) >= xs[n + 1]) {
                return Err(Error::Interleaving { index: n });
            }
        }
        Ok(LacunarySpec { xs, ys })
    }

    pub fn depth(&self) -> usize {
        self.xs.len()
    }

    pub fn blocks(&self) -> Vec<Interval> {
        self.xs.iter().zip(&self.ys).map(|(&x, &y)| Interval::closed(x, y).expect("x < y")).collect()
    }
}

pub fn lacunary_set(spec: &LacunarySpec) -> IntervalUnion {
    IntervalUnion::normalize(spec.blocks())
}

/// `y_n = ratio^n`, `x_n = ⌈β y_{n-1}⌉` (with `y_0 = 1`), `n = 1..=depth`.
pub fn lacunary_ratio_schedule(beta: &Rational, ratio: u64, depth: usize) -> Result<LacunarySpec> {
    if *beta < Rational::one() {
        return Err(Error::InvalidParameter("beta must be at least 1".into()));
    }
    let mut xs = Vec::with_capacity(depth);
    let mut ys = Vec::with_capacity(depth);
    let mut prev = 1u64;
    for n in 1..=depth as u32 {
        let y = ratio
            .checked_pow(n)
            .ok_or_else(|| Error::InvalidSchedule(format!("{ratio}^{n} exceeds u64")))?;
        xs.push(rational::ceil_to_u64(&(beta * rational::from_u64(prev)))?);
        ys.push(y);
        prev = y;
    }
    LacunarySpec::from_vecs(xs, ys)
}

/// `y_n = ⌈x_n / (1 - α)⌉`, `x_{n+1} = ratio · y_n`.
pub fn lacunary_gap_schedule(alpha: &Rational, ratio: u64, depth: usize, x1: u64) -> Result<LacunarySpec> {
    if !rational::in_unit_open_closed(alpha) || *alpha == Rational::one() {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1)".into()));
    }
    let keep = Rational::one() - alpha;
    let mut xs = Vec::with_capacity(depth);
    let mut ys = Vec::with_capacity(depth);
    let mut x = x1;
    for _ in 0..depth {
        let y = rational::ceil_to_u64(&(rational::from_u64(x) / &keep))?;
        xs.push(x);
        ys.push(y);
        x = ratio
            .checked_mul(y)
            .ok_or_else(|| Error::InvalidSchedule("gap schedule exceeds u64".into()))?;
    }
    LacunarySpec::from_vecs(xs, ys)
}

/// Blocks `⟦⌈(1-α)T_n⌉, T_n⟧` of the thinned-interval construction.
pub fn afa_blocks(alpha: &Rational, t: &GrowthSchedule) -> Result<Vec<Interval>> {
    if !rational::in_unit_open_closed(alpha) {
        return Err(Error::InvalidParameter("alpha must lie in (0, 1]".into()));
    }
    let keep = Rational::one() - alpha;
    let blocks = t
        .checkpoints()
        .iter()
        .map(|&tn| Interval::closed(rational::ceil_to_u64(&(&keep * rational::from_u64(tn)))?, tn))
        .collect::<Result<Vec<_>>>()?;
    for (i, w) in blocks.windows(2).enumerate() {
        if w[1].lo() <= w[0].hi() {
            return Err(Error::BlockOverlap { index: i + 1 });
        }
    }
    Ok(blocks)
}

pub fn afa_set(alpha: &Rational, t: &GrowthSchedule) -> Result<IntervalUnion> {
    Ok(IntervalUnion::normalize(afa_blocks(alpha, t)?))
}

/// `x_n = 2^{n²}`, `y_n = ⌊2^{(n+1)²} / β⌋`, from the first `n ≥ 1` with
/// `y_n > x_n`, for `depth` blocks.
pub fn th23_base(beta: &Rational, depth: usize) -> Result<LacunarySpec> {
    if *beta < rational::rat(2, 1) {
        return Err(Error::InvalidParameter("beta must be at least 2".into()));
    }
    if depth < 2 {
        return Err(Error::InvalidSchedule("depth must be at least 2".into()));
    }
    let pow2 = |e: u32| Rational::from_integer(num_bigint::BigInt::one() << e as usize);
    let end = |n: u32| rational::floor_to_u64(&(pow2((n + 1) * (n + 1)) / beta));
    let mut n = 1u32;
    while end(n).map_or(true, |y| y <= 1u64 << (n * n)) {
        n += 1;
        if n * n >= 64 {
            return Err(Error::InvalidSchedule("no admissible first block below 2^64".into()));
        }
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for k in n..n + depth as u32 {
        let x = 1u64
            .checked_shl(k * k)
            .filter(|_| k * k < 64)
            .ok_or_else(|| Error::InvalidSchedule(format!("2^({k}²) exceeds u64 at depth {depth}")))?;
        let y = end(k).map_err(|_| Error::InvalidSchedule(format!("block {k} end exceeds u64 at depth {depth}")))?;
        xs.push(x);
        ys.push(y);
    }
    LacunarySpec::from_vecs(xs, ys)
}

/// Per-block Bernoulli parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PSchedule {
    Constant { p: f64 },
    /// `p_n = 1 / √n` for block `n ≥ 1`.
    InverseSqrt,
    /// Odd blocks use `odd`, even blocks `even`.
    Alternating { odd: f64, even: f64 },
}

impl PSchedule {
    pub fn p(&self, block: u64) -> f64 {
        match *self {
            PSchedule::Constant { p } => p,
            PSchedule::InverseSqrt => 1.0 / (block.max(1) as f64).sqrt(),
            PSchedule::Alternating { odd, even } => {
                if block % 2 == 1 {
                    odd
                } else {
                    even
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |p: f64| (0.0..=1.0).contains(&p);
        let valid = match *self {
            PSchedule::Constant { p } => ok(p),
            PSchedule::InverseSqrt => true,
            PSchedule::Alternating { odd, even } => ok(odd) && ok(even),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("probability outside [0, 1] in {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BernoulliSpec {
    pub schedule: PSchedule,
    pub seed: u64,
}

/// Keeps each member of `carrier ∩ span` with probability `p`, drawing from
/// substream `block` of `seed`; the result is based at `span.lo()`.
pub fn bernoulli_block(carrier: &WindowSet, span: Interval, p: f64, seed: u64, block: u64) -> Result<WindowSet> {
    let mut out = WindowSet::empty(span.lo(), span.len())?;
    let mut coin = Coin::new(seed, block, p)?;
    let lo = span.lo().max(carrier.base());
    let hi = span.hi().min(carrier.end());
    if lo >= hi {
        return Ok(out);
    }
    let words = carrier.words();
    let first = ((lo - carrier.base()) / 64) as usize;
    let last = ((hi - 1 - carrier.base()) / 64) as usize;
    for (wi, &word) in words.iter().enumerate().take(last + 1).skip(first) {
        let mut bits = word;
        let base = carrier.base() + wi as u64 * 64;
        while bits != 0 {
            let x = base + bits.trailing_zeros() as u64;
            bits &= bits - 1;
            if x < lo || x >= hi {
                continue;
            }
            if coin.flip() {
                out.insert(x);
            }
        }
    }
    Ok(out)
}

/// Bernoulli subset over the whole carrier window, treated as block 1.
pub fn bernoulli_subset(carrier: &WindowSet, spec: &BernoulliSpec) -> Result<WindowSet> {
    spec.schedule.validate()?;
    let span = Interval::new(carrier.base(), carrier.end())?;
    bernoulli_block(carrier, span, spec.schedule.p(1), spec.seed, 1)
}

/// Bernoulli subset block by block; block `n` (1-based) uses `p_n` and substream `n`.
pub fn bernoulli_blocks(carrier: &WindowSet, blocks: &[Interval], spec: &BernoulliSpec) -> Result<WindowSet> {
    spec.schedule.validate()?;
    let parts: Vec<WindowSet> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, &span)| {
            let n = i as u64 + 1;
            bernoulli_block(carrier, span, spec.schedule.p(n), spec.seed, n)
        })
        .collect::<Result<_>>()?;
    let mut out = WindowSet::empty(carrier.base(), carrier.len())?;
    for part in &parts {
        out.or_from(part)?;
    }
    Ok(out)
}

/// `σ = (α₁, α₂, β₁, β₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaParams {
    #[serde(with = "rational::as_string")]
    pub alpha1: Rational,
    #[serde(with = "rational::as_string")]
    pub alpha2: Rational,
    #[serde(with = "rational::as_string")]
    pub beta1: Rational,
    #[serde(with = "rational::as_string")]
    pub beta2: Rational,
}

impl SigmaParams {
    pub fn new(alpha1: Rational, alpha2: Rational, beta1: Rational, beta2: Rational) -> Result<Self> {
        let s = SigmaParams { alpha1, alpha2, beta1, beta2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [&self.alpha1, &self.alpha2, &self.beta1, &self.beta2];
        if !all.iter().all(|r| rational::in_unit_open_closed(r)) {
            return Err(Error::InvalidParameter("sigma coordinates must lie in (0, 1]".into()));
        }
        if self.alpha1 > self.alpha2 {
            return Err(Error::InvalidParameter("sigma needs alpha1 <= alpha2".into()));
        }
        if &self.beta1 * &self.alpha1 > &self.beta2 * &self.alpha2 {
            return Err(Error::InvalidParameter("sigma needs beta1*alpha1 <= beta2*alpha2".into()));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [Rational; 4] {
        [self.alpha1.clone(), self.alpha2.clone(), self.beta1.clone(), self.beta2.clone()]
    }

    /// Arc length and keep probability of block `n` (odd blocks use index 1).
    pub fn block_params(&self, n: u64) -> (&Rational, &Rational) {
        if n % 2 == 1 {
            (&self.alpha1, &self.beta1)
        } else {
            (&self.alpha2, &self.beta2)
        }
    }
}

/// Blocks `[a_{n-1}, a_n)` for `n = 1..depth`.
pub fn schedule_blocks(a: &GrowthSchedule) -> Vec<Interval> {
    a.checkpoints()
        .windows(2)
        .map(|w| Interval::new(w[0], w[1]).expect("strictly increasing"))
        .collect()
}

/// Block `n` of the composite construction: a Bernoulli subset (parameter
/// `β`) of the Bohr set `{m ∈ span : frac(mθ) ∈ [0, α)}`.
pub fn composite_block(sigma: &SigmaParams, theta: &ThetaValue, span: Interval, n: u64, seed: u64) -> Result<WindowSet> {
    let (alpha, beta) = sigma.block_params(n);
    let arc = CircleArc::from_rationals(&Rational::zero(), alpha)?;
    let mut carrier = WindowSet::empty(span.lo(), span.len())?;
    bohr_fill(&theta.rotation(), &arc, span, &mut carrier)?;
    if beta.is_one() {
        return Ok(carrier);
    }
    bernoulli_block(&carrier, span, rational::to_f64(beta), seed, n)
}

/// The composite set on the window `[0, a_last]`, with its block layout.
pub fn composite_set(sigma: &SigmaParams, theta: &ThetaValue, a: &GrowthSchedule, seed: u64) -> Result<BlockedSet> {
    sigma.validate()?;
    if a.depth() < 4 {
        return Err(Error::InvalidSchedule(format!("composite needs depth >= 4, got {}", a.depth())));
    }
    let spans = schedule_blocks(a);
    let parts: Vec<WindowSet> = spans
        .par_iter()
        .enumerate()
        .map(|(i, &span)| composite_block(sigma, theta, span, i as u64 + 1, seed))
        .collect::<Result<_>>()?;
    let mut bits = WindowSet::empty(0, a.last() + 1)?;
    for part in &parts {
        bits.or_from(part)?;
    }
    let blocks = spans
        .iter()
        .enumerate()
        .map(|(i, &span)| {
            let (alpha, _) = sigma.block_params(i as u64 + 1);
            Ok(Block { span, arc: Some(CircleArc::from_rationals(&Rational::zero(), alpha)?) })
        })
        .collect::<Result<Vec<_>>>()?;
    BlockedSet::new(bits, blocks, Some(theta.rotation().theta))
}

/// Bernoulli thinning of the interval blocks of `carrier`: the carrier and the thinned set share one layout.
#[derive(Clone, Debug)]
pub struct ThinnedRun {
    pub carrier: IntervalUnion,
    pub blocks: Vec<Interval>,
    pub thinned: BlockedSet,
}

/// Bernoulli subsets `A_n ⊆ B_n` of interval blocks (block `n` is 1-based in `blocks`).
pub fn thinned_blocks(blocks: Vec<Interval>, spec: &BernoulliSpec) -> Result<ThinnedRun> {
    spec.schedule.validate()?;
    let end = blocks.last().ok_or_else(|| Error::Precondition("no blocks".into()))?.hi();
    let parts: Vec<WindowSet> = blocks
        .par_iter()
        .enumerate()
        .map(|(i, &span)| {
            let n = i as u64 + 1;
            let p = spec.schedule.p(n);
            let mut full = WindowSet::empty(span.lo(), span.len())?;
            full.insert_range(span.lo(), span.hi());
            bernoulli_block(&full, span, p, spec.seed, n)
        })
        .collect::<Result<_>>()?;
    let mut bits = WindowSet::empty(0, end)?;
    for part in &parts {
        bits.or_from(part)?;
    }
    let layout = blocks.iter().map(|&span| Block { span, arc: None }).collect();
    Ok(ThinnedRun {
        carrier: IntervalUnion::normalize(blocks.iter().copied()),
        thinned: BlockedSet::new(bits, layout, None)?,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::sumset::{estimate_subject, CheckpointPlan, Subject};

    #[test]
    fn lacunary_example() {
        let spec = LacunarySpec::from_vecs(vec![2, 200], vec![4, 400]).unwrap();
        assert_eq!(lacunary_set(&spec), IntervalUnion::from_pairs(&[(2, 5), (200, 401)]).unwrap());
        assert!(matches!(LacunarySpec::from_vecs(vec![2, 4], vec![5, 9]), Err(Error::Interleaving { index: 0 })));
    }

    #[test]
    fn afa_examples() {
        let t = GrowthSchedule::explicit(vec![100, 10_000, 1_000_000]).unwrap();
        assert_eq!(
            afa_set(&rat(1, 2), &t).unwrap(),
            IntervalUnion::from_pairs(&[(50, 101), (5000, 10_001), (500_000, 1_000_001)]).unwrap()
        );
        let slow = GrowthSchedule::explicit(vec![10, 1000]).unwrap();
        assert!(matches!(afa_set(&rat(1, 1), &slow), Err(Error::BlockOverlap { .. })));
    }

    #[test]
    fn th23_base_schedule() {
        let s = th23_base(&rat(4, 1), 6).unwrap();
        assert_eq!(s.xs, vec![2, 16, 512, 1 << 16, 1 << 25, 1 << 36]);
        assert_eq!(s.ys, vec![4, 128, 1 << 14, 1 << 23, 1 << 34, 1 << 47]);
        assert!(th23_base(&rat(4, 1), 7).is_ok());
        assert!(matches!(th23_base(&rat(4, 1), 8), Err(Error::InvalidSchedule(_))));
    }

    #[test]
    fn ratio_schedule_example() {
        let s = lacunary_ratio_schedule(&rat(2, 1), 100, 3).unwrap();
        assert_eq!(s.xs, vec![2, 200, 20_000]);
        assert_eq!(s.ys, vec![100, 10_000, 1_000_000]);
    }

    #[test]
    fn constant_ratio_desk_schedule_misses_upper_density() {
        // y_n = 50^n, x_n = 4 y_{n-1}: x_n / y_n stays at 0.08, so the upper
        // density settles near 0.94 instead of 1.
        let spec = lacunary_ratio_schedule(&rat(4, 1), 50, 6).unwrap();
        let plan = CheckpointPlan::new(spec.xs.clone(), spec.ys.clone(), *spec.ys.last().unwrap() + 1);
        let run = estimate_subject(&Subject::Intervals(lacunary_set(&spec)), &plan, 0).unwrap();
        let upper = run.estimate.udens_a;
        // Upper density is the maximum over the last three upper checkpoints.
        let (xs, ys) = (&spec.xs, &spec.ys);
        let exact = (3..6)
            .map(|k| (0..=k).map(|i| ys[i] - xs[i] + 1).sum::<u64>() as f64 / ys[k] as f64)
            .fold(0.0, f64::max);
        assert!((upper - exact).abs() < 1e-12);
        assert!((upper - 0.9388).abs() < 1e-3, "{upper}");
    }

    #[test]
    fn bernoulli_extremes_and_subset() {
        let carrier = IntervalUnion::from_pairs(&[(5, 900)]).unwrap().materialize(0, 1000).unwrap();
        let all = bernoulli_subset(&carrier, &BernoulliSpec { schedule: PSchedule::Constant { p: 1.0 }, seed: 3 }).unwrap();
        assert_eq!(all, carrier);
        let none = bernoulli_subset(&carrier, &BernoulliSpec { schedule: PSchedule::Constant { p: 0.0 }, seed: 3 }).unwrap();
        assert!(none.is_empty());
        let half = bernoulli_subset(&carrier, &BernoulliSpec { schedule: PSchedule::Constant { p: 0.5 }, seed: 3 }).unwrap();
        assert!(half.iter().all(|x| carrier.contains(x)));
    }

    #[test]
    fn bernoulli_half_concentrates() {
        let n = 1_000_000;
        let carrier = IntervalUnion::from_pairs(&[(0, n)]).unwrap().materialize(0, n).unwrap();
        let s = bernoulli_subset(&carrier, &BernoulliSpec { schedule: PSchedule::Constant { p: 0.5 }, seed: 11 }).unwrap();
        let c = s.count_ones() as i64;
        assert!((c - 500_000).abs() <= 1500, "{c}");
    }

    #[test]
    fn sigma_validation() {
        assert!(SigmaParams::new(rat(1, 2), rat(2, 5), rat(1, 1), rat(1, 1)).is_err());
        assert!(SigmaParams::new(rat(2, 5), rat(1, 2), rat(1, 1), rat(1, 2)).is_err());
        assert!(SigmaParams::new(rat(2, 5), rat(1, 2), rat(1, 2), rat(4, 5)).is_ok());
    }
}
