//! Experiment configurations and run records.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::constructors::{
    afa_blocks, composite_set, lacunary_gap_schedule, lacunary_ratio_schedule, lacunary_set, th23_base,
    thinned_blocks, BernoulliSpec, LacunarySpec, PSchedule, SigmaParams,
};
use crate::dioph::{ThetaSource, ThetaValue, DEFAULT_PRECISION_BITS};
use crate::error::{Error, Result};
use crate::montecarlo::{verify_dens0_hypothesis, Dens0Report};
use crate::rational::{self, Rational};
use crate::regions::{f_freiman, map_g};
use crate::rng::resolve_seed;
use crate::sets::{GrowthSchedule, Interval, IntervalUnion};
use crate::sumset::{estimate_subject, CheckpointDensity, CheckpointPlan, ProfileEstimate, Subject};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_BUDGET: u64 = 1 << 32;
pub const DEFAULT_TOLERANCE: f64 = 0.05;
/// Used when neither the config nor the environment supplies a seed.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    /// `⟦0, n⟧`, sampled at `n / 2^k` for `k < depth`.
    FullInterval {
        n: u64,
        #[serde(default = "default_full_depth")]
        depth: usize,
    },
    /// Explicit blocks `⟦x_k, y_k⟧`.
    Lacunary { xs: Vec<u64>, ys: Vec<u64> },
    /// `y_k = ratio^k`, `x_k = ⌈β y_{k-1}⌉`.
    LacunaryRatio {
        #[serde(with = "rational::as_string")]
        beta: Rational,
        ratio: u64,
        depth: usize,
    },
    /// `y_k = ⌈x_k / (1 - α)⌉`, `x_{k+1} = ratio · y_k`.
    LacunaryGap {
        #[serde(with = "rational::as_string")]
        alpha: Rational,
        ratio: u64,
        depth: usize,
        x1: u64,
    },
    /// Blocks `⟦⌈(1-α)T_k⌉, T_k⟧` on a geometric schedule from `t0`.
    Afa {
        #[serde(with = "rational::as_string")]
        alpha: Rational,
        #[serde(with = "rational::as_string")]
        ratio: Rational,
        depth: usize,
        t0: u64,
    },
    /// `x_k = 2^{k²}`, `y_k = ⌊2^{(k+1)²}/β⌋`.
    Th23 {
        #[serde(with = "rational::as_string")]
        beta: Rational,
        depth: usize,
    },
    /// Bohr–Bernoulli blocks `[a_{k-1}, a_k)` on a geometric schedule from `a0`
    /// with `depth` checkpoints.
    Composite {
        #[serde(with = "rational::as_string")]
        alpha1: Rational,
        #[serde(with = "rational::as_string")]
        alpha2: Rational,
        #[serde(with = "rational::as_string")]
        beta1: Rational,
        #[serde(with = "rational::as_string")]
        beta2: Rational,
        #[serde(with = "rational::as_string")]
        ratio: Rational,
        depth: usize,
        a0: u64,
    },
    /// Bernoulli thinning (parameter `beta`, or `1/√k` in block `k` when
    /// `decay` is set) of the `afa` blocks.
    Thinned {
        #[serde(with = "rational::as_string")]
        alpha: Rational,
        #[serde(with = "rational::as_string")]
        ratio: Rational,
        depth: usize,
        t0: u64,
        beta: f64,
        #[serde(default)]
        decay: bool,
    },
}

fn default_full_depth() -> usize {
    4
}

impl Construction {
    pub fn is_random(&self) -> bool {
        matches!(self, Construction::Composite { .. } | Construction::Thinned { .. })
    }

    pub fn sigma(&self) -> Option<Result<SigmaParams>> {
        match self {
            Construction::Composite { alpha1, alpha2, beta1, beta2, .. } => {
                Some(SigmaParams::new(alpha1.clone(), alpha2.clone(), beta1.clone(), beta2.clone()))
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Parse(format!("unknown format {other:?} (json, csv)"))),
        }
    }
}

fn default_theta() -> ThetaSource {
    ThetaSource::Golden
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION_BITS
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub construction: Construction,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_theta")]
    pub theta: ThetaSource,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    /// Largest explicit window, in bits.
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(construction: Construction) -> Self {
        ExperimentConfig {
            construction,
            seed: None,
            theta: default_theta(),
            precision_bits: DEFAULT_PRECISION_BITS,
            budget: DEFAULT_BUDGET,
            tolerance: DEFAULT_TOLERANCE,
            format: OutputFormat::Json,
        }
    }

    /// JSON when the text starts with `{`, flat `key=value` lines otherwise.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
        } else {
            Self::parse_flat(text)
        }
    }

    /// `key=value` lines (or whitespace-separated pairs); `#` starts a comment.
    /// Keys other than the top-level ones belong to the construction; lists are comma-separated.
    pub fn parse_flat(text: &str) -> Result<Self> {
        let mut top = Map::new();
        let mut inner = Map::new();
        for token in text.lines().map(|l| l.split('#').next().unwrap_or("")).flat_map(str::split_whitespace) {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {token:?}")))?;
            let value = flat_value(k, v);
            let target = if TOP_LEVEL_KEYS.contains(&k) { &mut top } else { &mut inner };
            if target.insert(k.to_string(), value).is_some() {
                return Err(Error::Parse(format!("duplicate key {k:?}")));
            }
        }
        top.insert("construction".into(), Value::Object(inner));
        serde_json::from_value(Value::Object(top)).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// One `key=value` per line, construction keys first.
    pub fn to_flat(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let obj = value.as_object().expect("object");
        let mut lines = Vec::new();
        if let Some(Value::Object(c)) = obj.get("construction") {
            lines.push(format!("kind={}", flat_text(&c["kind"])));
            lines.extend(c.iter().filter(|(k, _)| *k != "kind").map(|(k, v)| format!("{k}={}", flat_text(v))));
        }
        for (k, v) in obj.iter().filter(|(k, v)| *k != "construction" && !v.is_null()) {
            lines.push(format!("{k}={}", flat_text(v)));
        }
        lines.join("\n") + "\n"
    }

    /// Replaces one existing construction parameter, given as flat text.
    pub fn set_parameter(&mut self, key: &str, raw: &str) -> Result<()> {
        let mut value = serde_json::to_value(&self.construction).expect("construction serializes");
        let obj = value.as_object_mut().expect("object");
        let kind = flat_text(&obj["kind"]);
        let new = match obj.get(key) {
            Some(Value::String(_)) if key != "kind" => Value::String(raw.to_string()),
            Some(_) if key != "kind" => flat_value(key, raw),
            _ => return Err(Error::InvalidParameter(format!("construction {kind} has no parameter {key:?}"))),
        };
        obj.insert(key.to_string(), new);
        self.construction = serde_json::from_value(value).map_err(|e| Error::Parse(format!("{key}={raw}: {e}")))?;
        Ok(())
    }
}

const TOP_LEVEL_KEYS: [&str; 6] = ["seed", "theta", "precision_bits", "budget", "tolerance", "format"];

/// Keys that always hold text even when they look numeric.
const TEXT_KEYS: [&str; 3] = ["kind", "theta", "format"];

fn flat_value(key: &str, raw: &str) -> Value {
    if TEXT_KEYS.contains(&key) {
        return Value::String(raw.to_string());
    }
    if matches!(key, "xs" | "ys") {
        return Value::Array(raw.split(',').map(|t| scalar(t.trim())).collect());
    }
    scalar(raw)
}

fn scalar(raw: &str) -> Value {
    match serde_json::from_str::<Value>(raw) {
        Ok(v @ (Value::Number(_) | Value::Bool(_))) => v,
        _ => Value::String(raw.to_string()),
    }
}

fn flat_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(flat_text).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Per-coordinate values with the estimator's field names.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Coordinates {
    #[serde(rename = "ldens_A")]
    pub ldens_a: Option<f64>,
    #[serde(rename = "udens_A")]
    pub udens_a: Option<f64>,
    #[serde(rename = "ldens_2A")]
    pub ldens_2a: Option<f64>,
    #[serde(rename = "udens_2A")]
    pub udens_2a: Option<f64>,
}

impl Coordinates {
    pub fn from_array(v: [Option<f64>; 4]) -> Self {
        Coordinates { ldens_a: v[0], udens_a: v[1], ldens_2a: v[2], udens_2a: v[3] }
    }

    pub fn as_array(&self) -> [Option<f64>; 4] {
        [self.ldens_a, self.udens_a, self.ldens_2a, self.udens_2a]
    }
}

pub const COORDINATE_NAMES: [&str; 4] = ["ldens_A", "udens_A", "ldens_2A", "udens_2A"];

/// A built construction, ready for the estimator.
pub struct Prepared {
    pub subject: Subject,
    pub plan: CheckpointPlan,
    /// Limit profile asserted for this construction (only the coordinates it constrains).
    pub predicted: Option<Coordinates>,
}

fn geometric(ratio: &Rational, depth: usize, seed: u64) -> Result<GrowthSchedule> {
    GrowthSchedule::geometric(ratio.clone(), depth, seed)
}

fn f64_of(r: &Rational) -> f64 {
    rational::to_f64(r)
}

fn lacunary_prepared(spec: &LacunarySpec, horizon: u64, predicted: Option<Coordinates>) -> Prepared {
    Prepared {
        subject: Subject::Intervals(lacunary_set(spec)),
        plan: CheckpointPlan::new(spec.xs.clone(), spec.ys.clone(), horizon),
        predicted,
    }
}

/// Sumsets are exact below the start of the next block of the unbounded construction.
fn afa_horizon(alpha: &Rational, t: &GrowthSchedule) -> u64 {
    t.next_checkpoint()
        .and_then(|next| rational::ceil_to_u64(&((Rational::one() - alpha) * rational::from_u64(next))).ok())
        .unwrap_or(u64::MAX)
}

/// Refuses a materialized set window larger than the budget before it is allocated.
fn check_window(last: u64, budget: u64) -> Result<()> {
    let needed = last.saturating_add(1);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    Ok(())
}

pub fn prepare(config: &ExperimentConfig, seed: u64) -> Result<Prepared> {
    Ok(match &config.construction {
        Construction::FullInterval { n, depth } => {
            if *depth == 0 || *n >> (depth - 1) == 0 {
                return Err(Error::InvalidParameter(format!("n = {n} too small for {depth} checkpoints")));
            }
            let cps: Vec<u64> = (0..*depth).rev().map(|k| n >> k).collect();
            Prepared {
                subject: Subject::Intervals(IntervalUnion::normalize([Interval::closed(0, *n)?])),
                plan: CheckpointPlan::new(cps.clone(), cps, n + 1),
                predicted: Some(Coordinates::from_array([Some(1.0); 4])),
            }
        }
        Construction::Lacunary { xs, ys } => {
            let spec = LacunarySpec::from_vecs(xs.clone(), ys.clone())?;
            let horizon = ys.last().map_or(1, |y| y + 1);
            lacunary_prepared(&spec, horizon, None)
        }
        Construction::LacunaryRatio { beta, ratio, depth } => {
            let spec = lacunary_ratio_schedule(beta, *ratio, *depth)?;
            let horizon = rational::ceil_to_u64(&(beta * rational::from_u64(*spec.ys.last().unwrap()))).unwrap_or(u64::MAX);
            lacunary_prepared(&spec, horizon, Some(Coordinates::from_array([Some(1.0 / f64_of(beta)), Some(1.0), None, None])))
        }
        Construction::LacunaryGap { alpha, ratio, depth, x1 } => {
            let spec = lacunary_gap_schedule(alpha, *ratio, *depth, *x1)?;
            let horizon = spec.ys.last().unwrap().saturating_mul(*ratio);
            lacunary_prepared(&spec, horizon, Some(Coordinates::from_array([Some(0.0), Some(f64_of(alpha)), None, None])))
        }
        Construction::Th23 { beta, depth } => {
            let spec = th23_base(beta, *depth)?;
            let b = f64_of(beta);
            let next = spec.xs.len() as u32 + spec.xs[0].trailing_zeros().isqrt();
            let horizon = 1u64.checked_shl(next * next).filter(|_| next * next < 64).unwrap_or(u64::MAX);
            lacunary_prepared(&spec, horizon, Some(Coordinates::from_array([Some(1.0 / b), Some(1.0), Some(2.0 / b), Some(1.0)])))
        }
        Construction::Afa { alpha, ratio, depth, t0 } => {
            let t = geometric(ratio, *depth, *t0)?;
            let blocks = afa_blocks(alpha, &t)?;
            let f = f64_of(&f_freiman(alpha)?);
            Prepared {
                plan: CheckpointPlan::new(blocks.iter().map(Interval::lo).collect(), t.checkpoints().to_vec(), afa_horizon(alpha, &t)),
                subject: Subject::Intervals(IntervalUnion::normalize(blocks)),
                predicted: Some(Coordinates::from_array([None, Some(f64_of(alpha)), None, Some(f)])),
            }
        }
        Construction::Thinned { alpha, ratio, depth, t0, beta, decay } => {
            let t = geometric(ratio, *depth, *t0)?;
            check_window(t.last(), config.budget)?;
            let blocks = afa_blocks(alpha, &t)?;
            let schedule = if *decay { PSchedule::InverseSqrt } else { PSchedule::Constant { p: *beta } };
            let lower = blocks.iter().map(Interval::lo).collect();
            let upper: Vec<u64> = t.checkpoints().to_vec();
            let horizon = afa_horizon(alpha, &t).min(2 * upper.last().unwrap() + 1);
            let run = thinned_blocks(blocks, &BernoulliSpec { schedule, seed })?;
            let a = f64_of(alpha);
            let udens = if *decay { 0.0 } else { a * beta };
            Prepared {
                subject: Subject::Blocked(run.thinned),
                plan: CheckpointPlan::new(lower, upper, horizon),
                predicted: Some(Coordinates::from_array([None, Some(udens), None, Some(f64_of(&f_freiman(alpha)?))])),
            }
        }
        Construction::Composite { ratio, depth, a0, .. } => {
            let sigma = config.construction.sigma().expect("composite")?;
            let a = geometric(ratio, *depth, *a0)?;
            check_window(a.last(), config.budget)?;
            let theta = ThetaValue::new(config.theta.clone(), config.precision_bits)?;
            let set = composite_set(&sigma, &theta, &a, seed)?;
            let cps = a.checkpoints();
            let pick = |parity: usize| -> Vec<u64> { (1..cps.len()).filter(|n| n % 2 == parity).map(|n| cps[n]).collect() };
            let (lower, upper) = (pick(1), pick(0));
            let plan = CheckpointPlan { sumset_lower: lower.clone(), sumset_upper: upper.clone(), lower, upper };
            let g = map_g(&sigma)?.to_f64();
            Prepared {
                subject: Subject::Blocked(set),
                plan,
                predicted: Some(Coordinates::from_array(g.map(Some))),
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// The configuration with the seed actually used filled in.
    pub config: ExperimentConfig,
    pub checkpoints: Vec<CheckpointDensity>,
    pub profile_estimate: ProfileEstimate,
    pub predicted: Option<Coordinates>,
    /// `|estimate - predicted|` wherever a prediction exists.
    pub deviations: Option<Coordinates>,
    pub max_deviation: Option<f64>,
    pub within_tolerance: bool,
    pub seed: Option<u64>,
    pub version: String,
    pub wall_time_ms: f64,
}

impl RunRecord {
    /// Equality of everything except wall time.
    pub fn same_result(&self, other: &RunRecord) -> bool {
        RunRecord { wall_time_ms: 0.0, ..self.clone() } == RunRecord { wall_time_ms: 0.0, ..other.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    /// Checkpoint rows followed by one row per estimated coordinate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,name,x,count,value,predicted,deviation\n");
        for c in &self.checkpoints {
            out += &format!("checkpoint,{}/{},{},{},{},,\n", c.set, c.side, c.x, c.count, c.density);
        }
        let est = self.profile_estimate.as_array();
        let pred = self.predicted.map(|p| p.as_array()).unwrap_or([None; 4]);
        let dev = self.deviations.map(|p| p.as_array()).unwrap_or([None; 4]);
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for i in 0..4 {
            out += &format!("estimate,{},,,{},{},{}\n", COORDINATE_NAMES[i], est[i], opt(pred[i]), opt(dev[i]));
        }
        out
    }

    pub fn render(&self) -> String {
        match self.config.format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}

/// Builds the construction, estimates its profile and compares with the prediction.
pub fn run_profile(config: &ExperimentConfig) -> Result<RunRecord> {
    let start = Instant::now();
    if !(config.tolerance >= 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} must be non-negative", config.tolerance)));
    }
    if let Some(sigma) = config.construction.sigma() {
        sigma?;
    }
    let seed = if config.construction.is_random() {
        Some(resolve_seed(config.seed)?.unwrap_or(DEFAULT_SEED))
    } else {
        config.seed
    };
    let prepared = prepare(config, seed.unwrap_or(DEFAULT_SEED))?;
    let run = estimate_subject(&prepared.subject, &prepared.plan, config.budget)?;
    let est = run.estimate.as_array();
    let deviations = prepared.predicted.map(|p| {
        let pa = p.as_array();
        Coordinates::from_array(std::array::from_fn(|i| pa[i].map(|v| (est[i] - v).abs())))
    });
    let max_deviation = deviations.and_then(|d| d.as_array().into_iter().flatten().reduce(f64::max));
    let within_tolerance = max_deviation.is_none_or(|m| m <= config.tolerance);
    Ok(RunRecord {
        config: ExperimentConfig { seed, ..config.clone() },
        checkpoints: run.checkpoints,
        profile_estimate: run.estimate,
        predicted: prepared.predicted,
        deviations,
        max_deviation,
        within_tolerance,
        seed,
        version: VERSION.to_string(),
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Exact exceptional sets of a thinned construction. Checkpoints are the
/// schedule points followed by `2 max(A)`.
pub fn run_dens0(config: &ExperimentConfig, epsilons: &[f64]) -> Result<Dens0Report> {
    if !matches!(config.construction, Construction::Thinned { .. }) {
        return Err(Error::InvalidParameter("exceptional sets are defined for the thinned construction only".into()));
    }
    let seed = resolve_seed(config.seed)?.unwrap_or(DEFAULT_SEED);
    let prepared = prepare(config, seed)?;
    let Subject::Blocked(set) = &prepared.subject else { unreachable!("thinned runs are blocked") };
    let mut checkpoints = prepared.plan.upper.clone();
    checkpoints.push(2 * (set.bits().end() - 1));
    verify_dens0_hypothesis(set, epsilons, &checkpoints, config.budget)
}

/// Flat view of a record's estimate for quick inspection.
pub fn summary(record: &RunRecord) -> BTreeMap<&'static str, f64> {
    COORDINATE_NAMES.iter().copied().zip(record.profile_estimate.as_array()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn flat_and_json_configs_agree() {
        let flat = "kind=composite alpha1=2/5 alpha2=1/2 beta1=1/2 beta2=4/5\nratio=16 depth=5 a0=1\nseed=7 # fixed\ntolerance=0.08";
        let c = ExperimentConfig::parse(flat).unwrap();
        assert_eq!(ExperimentConfig::parse(&c.to_json()).unwrap(), c);
        assert_eq!(ExperimentConfig::parse(&c.to_flat()).unwrap(), c);
        assert_eq!(c.seed, Some(7));
        match &c.construction {
            Construction::Composite { alpha1, ratio, .. } => {
                assert_eq!(*alpha1, rat(2, 5));
                assert_eq!(*ratio, rat(16, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        assert!(ExperimentConfig::parse("kind=nope").is_err());
        assert!(ExperimentConfig::parse("kind=th23 beta").is_err());
        let swapped = ExperimentConfig::parse("kind=composite alpha1=1/2 alpha2=2/5 beta1=1 beta2=1 ratio=16 depth=5 a0=1").unwrap();
        assert!(matches!(run_profile(&swapped), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn full_interval_is_exact() {
        let r = run_profile(&ExperimentConfig::new(Construction::FullInterval { n: 1 << 20, depth: 4 })).unwrap();
        assert_eq!(r.profile_estimate.as_array(), [1.0; 4]);
        assert_eq!(r.max_deviation, Some(0.0));
        assert!(r.within_tolerance);
    }

    #[test]
    fn small_composite_repeats() {
        let c = ExperimentConfig::parse("kind=composite alpha1=2/5 alpha2=1/2 beta1=1/2 beta2=4/5 ratio=8 depth=5 a0=4 seed=3").unwrap();
        let a = run_profile(&c).unwrap();
        let b = run_profile(&a.config).unwrap();
        assert!(a.same_result(&b));
        assert!(a.to_csv().lines().count() > 4);
    }

    #[test]
    fn parameters_are_overridden_in_place() {
        let mut c = ExperimentConfig::parse("kind=composite alpha1=2/5 alpha2=1/2 beta1=1/2 beta2=4/5 ratio=8 depth=5 a0=4").unwrap();
        c.set_parameter("ratio", "16").unwrap();
        c.set_parameter("depth", "7").unwrap();
        match &c.construction {
            Construction::Composite { ratio, depth, .. } => assert_eq!((ratio.clone(), *depth), (rat(16, 1), 7)),
            other => panic!("{other:?}"),
        }
        let mut th = ExperimentConfig::parse("kind=th23 beta=4 depth=5").unwrap();
        assert!(matches!(th.set_parameter("ratio", "16"), Err(Error::InvalidParameter(_))));
        assert!(th.set_parameter("depth", "x").is_err());
    }

    #[test]
    fn dens0_needs_a_thinned_construction() {
        let c = ExperimentConfig::parse("kind=th23 beta=4 depth=3").unwrap();
        assert!(matches!(run_dens0(&c, &[0.1]), Err(Error::InvalidParameter(_))));
        let t = ExperimentConfig::parse("kind=thinned alpha=1/2 ratio=20 depth=4 t0=1 beta=1 seed=1").unwrap();
        let r = run_dens0(&t, &[0.1]).unwrap();
        assert_eq!(r.checkpoints.last().unwrap().x, 2 * 8000);
        assert_eq!(r.final_density, 0.0);
    }

    #[test]
    fn oversized_windows_are_refused_before_building() {
        let c = ExperimentConfig::parse("kind=composite alpha1=2/5 alpha2=1/2 beta1=1/2 beta2=4/5 ratio=16 depth=10 a0=1").unwrap();
        assert_eq!(run_profile(&c).unwrap_err(), Error::Budget { needed: (1 << 36) + 1, budget: DEFAULT_BUDGET });
    }
}
