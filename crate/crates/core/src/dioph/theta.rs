use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 256;
const MIN_PRECISION_BITS: u32 = 64;

/// Which irrational the rotation uses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ThetaSource {
    /// `(√5 - 1) / 2 = [0; 1, 1, 1, ...]`.
    Golden,
    /// `√2 - 1 = [0; 2, 2, 2, ...]`.
    Sqrt2Minus1,
    /// `[0; a1, ..., ak, ...]`, known only through the given prefix.
    Custom(Vec<u64>),
}

impl std::str::FromStr for ThetaSource {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "golden" => Ok(ThetaSource::Golden),
            "sqrt2m1" => Ok(ThetaSource::Sqrt2Minus1),
            other => {
                let body = other
                    .strip_prefix("cf:")
                    .ok_or_else(|| Error::Parse(format!("unknown theta {other:?} (golden, sqrt2m1, cf:a1,a2,...)")))?;
                let qs = body
                    .split(',')
                    .map(|t| t.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad quotient {t:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ThetaSource::Custom(qs))
            }
        }
    }
}

impl TryFrom<String> for ThetaSource {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ThetaSource> for String {
    fn from(t: ThetaSource) -> String {
        t.to_string()
    }
}

impl std::fmt::Display for ThetaSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThetaSource::Golden => write!(f, "golden"),
            ThetaSource::Sqrt2Minus1 => write!(f, "sqrt2m1"),
            ThetaSource::Custom(qs) => {
                let parts: Vec<String> = qs.iter().map(u64::to_string).collect();
                write!(f, "cf:{}", parts.join(","))
            }
        }
    }
}

/// `θ` in fixed point: `fixed / 2^precision_bits` is within
/// `error_ulps / 2^precision_bits` of the true value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaValue {
    source: ThetaSource,
    precision_bits: u32,
    fixed: BigUint,
    error_ulps: BigUint,
}

/// 128-bit view of `θ` used on hot paths: `theta / 2^128` with error `error / 2^128`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rotation {
    pub theta: u128,
    pub error: u128,
    /// Smallest endpoint margin any membership decision must clear.
    pub min_margin: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Convergent {
    pub p: u128,
    pub q: u128,
    /// Upper bound on `|θ - p/q|`.
    pub error_bound: f64,
}

impl ThetaValue {
    pub fn new(source: ThetaSource, precision_bits: u32) -> Result<Self> {
        if precision_bits < MIN_PRECISION_BITS {
            return Err(Error::InvalidParameter(format!(
                "precision {precision_bits} below {MIN_PRECISION_BITS} bits"
            )));
        }
        let one = BigUint::one() << precision_bits as usize;
        let (fixed, error_ulps) = match &source {
            ThetaSource::Golden => {
                let s = (BigUint::from(5u32) << (2 * precision_bits as usize)).sqrt();
                ((s - &one) >> 1usize, BigUint::one())
            }
            ThetaSource::Sqrt2Minus1 => {
                let s = (BigUint::from(2u32) << (2 * precision_bits as usize)).sqrt();
                (s - &one, BigUint::one())
            }
            ThetaSource::Custom(qs) => {
                if qs.is_empty() || qs.contains(&0) {
                    return Err(Error::InvalidParameter(
                        "custom partial quotients must be a non-empty list of integers >= 1".into(),
                    ));
                }
                let (p, q, q_prev) = convergent_big(qs);
                // The tail is unknown, so θ lies between p/q and (p + p')/(q + q').
                let fixed = (&p << precision_bits as usize) / &q;
                let denom = &q * (&q + &q_prev);
                let err = (&one + &denom - 1u32) / &denom + 1u32;
                (fixed, err)
            }
        };
        Ok(ThetaValue { source, precision_bits, fixed, error_ulps })
    }

    pub fn golden() -> Self {
        ThetaValue::new(ThetaSource::Golden, DEFAULT_PRECISION_BITS).expect("preset")
    }

    pub fn sqrt2_minus_1() -> Self {
        ThetaValue::new(ThetaSource::Sqrt2Minus1, DEFAULT_PRECISION_BITS).expect("preset")
    }

    pub fn source(&self) -> &ThetaSource {
        &self.source
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.precision_bits.saturating_sub(60);
        (&self.fixed >> shift as usize).to_f64().unwrap_or(f64::NAN) / 2f64.powi((self.precision_bits - shift) as i32)
    }

    /// First `count` partial quotients after the leading 0.
    pub fn partial_quotients(&self, count: usize) -> Result<Vec<u64>> {
        match &self.source {
            ThetaSource::Golden => Ok(vec![1; count]),
            ThetaSource::Sqrt2Minus1 => Ok(vec![2; count]),
            ThetaSource::Custom(qs) if count <= qs.len() => Ok(qs[..count].to_vec()),
            ThetaSource::Custom(qs) => Err(Error::Precision(format!(
                "{count} partial quotients requested, only {} known",
                qs.len()
            ))),
        }
    }

    pub fn rotation(&self) -> Rotation {
        let p = self.precision_bits as usize;
        let (theta, error) = if p >= 128 {
            let shift = p - 128;
            let theta = (&self.fixed >> shift).to_u128().expect("θ < 1");
            let scale = BigUint::one() << shift;
            let err = (&self.error_ulps + &scale - 1u32) / &scale + 1u32;
            (theta, err.to_u128().unwrap_or(u128::MAX))
        } else {
            let shift = 128 - p;
            let theta = (&self.fixed << shift).to_u128().expect("θ < 1");
            let err = (&self.error_ulps << shift).to_u128().unwrap_or(u128::MAX);
            (theta, err)
        };
        let half = self.precision_bits / 2;
        let min_margin = if half >= 128 { 1 } else { 1u128 << (128 - half) };
        Rotation { theta, error, min_margin }
    }

    /// Largest `k` accepted by [`norm_dist`].
    pub fn max_multiplier(&self) -> u64 {
        let bits = self.precision_bits * 5 / 32;
        if bits >= 64 {
            u64::MAX
        } else {
            1u64 << bits
        }
    }
}

fn convergent_big(qs: &[u64]) -> (BigUint, BigUint, BigUint) {
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    for &a in qs {
        let pn = &p * a + &p_prev;
        let qn = &q * a + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
    }
    (p, q, q_prev)
}

pub fn convergents(theta: &ThetaValue, count: usize) -> Result<Vec<Convergent>> {
    if count == 0 {
        return Err(Error::Precondition("count must be at least 1".into()));
    }
    let known_next = match theta.source() {
        ThetaSource::Custom(qs) => qs.len() > count,
        _ => true,
    };
    let qs = theta.partial_quotients(count)?;
    let next = if known_next { Some(theta.partial_quotients(count + 1)?[count]) } else { None };
    let overflow = || Error::Precision("convergent exceeds 128 bits".into());
    let (mut p_prev, mut p) = (1u128, 0u128);
    let (mut q_prev, mut q) = (0u128, 1u128);
    let mut out = Vec::with_capacity(count);
    for (i, &a) in qs.iter().enumerate() {
        let a = a as u128;
        let pn = a.checked_mul(p).and_then(|v| v.checked_add(p_prev)).ok_or_else(overflow)?;
        let qn = a.checked_mul(q).and_then(|v| v.checked_add(q_prev)).ok_or_else(overflow)?;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
        let following = if i + 1 < qs.len() { Some(qs[i + 1]) } else { next };
        let qf = q as f64;
        let error_bound = match following {
            Some(a_next) => 1.0 / (qf * (a_next as f64 * qf + q_prev as f64)),
            None => 1.0 / (qf * (qf + q_prev as f64)),
        };
        out.push(Convergent { p, q, error_bound });
    }
    Ok(out)
}

/// `‖kθ‖`, the distance from `kθ` to the nearest integer.
pub fn norm_dist(k: u64, theta: &ThetaValue) -> Result<f64> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if k > theta.max_multiplier() {
        return Err(Error::Precision(format!(
            "k = {k} above {} at {} bits",
            theta.max_multiplier(),
            theta.precision_bits
        )));
    }
    let p = theta.precision_bits as usize;
    let radius = &theta.error_ulps * k + 1u32;
    if radius.bits() as usize > p / 2 {
        return Err(Error::Precision(format!("error radius of {k}θ exceeds 2^-{}", p / 2)));
    }
    let modulus = BigUint::one() << p;
    let t = (&theta.fixed * k) % &modulus;
    let d = std::cmp::min(t.clone(), &modulus - &t);
    let shift = p.saturating_sub(60);
    Ok((d >> shift).to_f64().unwrap_or(f64::NAN) / 2f64.powi((p - shift) as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_and_sqrt2_values() {
        assert!((ThetaValue::golden().to_f64() - 0.618_033_988_749_895).abs() < 1e-15);
        assert!((ThetaValue::sqrt2_minus_1().to_f64() - 0.414_213_562_373_095).abs() < 1e-15);
    }

    #[test]
    fn convergent_denominators() {
        let g: Vec<u128> = convergents(&ThetaValue::golden(), 5).unwrap().iter().map(|c| c.q).collect();
        assert_eq!(g, vec![1, 2, 3, 5, 8]);
        let s: Vec<u128> = convergents(&ThetaValue::sqrt2_minus_1(), 3).unwrap().iter().map(|c| c.q).collect();
        assert_eq!(s, vec![2, 5, 12]);
    }

    #[test]
    fn custom_single_quotient() {
        let t = ThetaValue::new(ThetaSource::Custom(vec![1]), 256).unwrap();
        let c = convergents(&t, 1).unwrap();
        assert_eq!((c[0].p, c[0].q), (1, 1));
        assert!((c[0].error_bound - 0.5).abs() < 1e-12);
        assert!(matches!(convergents(&t, 2), Err(Error::Precision(_))));
        assert!(ThetaValue::new(ThetaSource::Custom(vec![2, 0]), 256).is_err());
    }

    #[test]
    fn convergents_approximate_theta() {
        for theta in [ThetaValue::golden(), ThetaValue::sqrt2_minus_1()] {
            let x = theta.to_f64();
            for c in convergents(&theta, 20).unwrap() {
                let err = (x - c.p as f64 / c.q as f64).abs();
                assert!(err < 1.0 / (c.q as f64 * c.q as f64));
                assert!(err <= c.error_bound * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn norm_dist_closed_forms() {
        let g = ThetaValue::golden();
        let s5 = 5f64.sqrt();
        assert!((norm_dist(1, &g).unwrap() - (3.0 - s5) / 2.0).abs() < 1e-15);
        assert!((norm_dist(2, &g).unwrap() - (s5 - 2.0)).abs() < 1e-15);
        assert!((norm_dist(1, &ThetaValue::sqrt2_minus_1()).unwrap() - (2f64.sqrt() - 1.0)).abs() < 1e-15);
        assert!(norm_dist(1 << 41, &g).is_err());
        assert!(norm_dist(1 << 40, &g).is_ok());
    }

    #[test]
    fn parse_theta_sources() {
        assert_eq!("golden".parse::<ThetaSource>().unwrap(), ThetaSource::Golden);
        assert_eq!("cf:1,2,3".parse::<ThetaSource>().unwrap(), ThetaSource::Custom(vec![1, 2, 3]));
        assert!("pi".parse::<ThetaSource>().is_err());
    }
}
