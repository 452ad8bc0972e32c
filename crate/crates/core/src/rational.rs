//! Exact rationals and the conversions the rest of the crate needs.
//!
//! Rationals are written `p/q` in configs and reports; plain integers and
//! finite decimals (`0.35`) are accepted on input and converted exactly.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() && int_digits.is_empty() {
            return Err(bad());
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let whole: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_val: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let mag = Rational::new(whole * &scale + frac_val, scale);
        return Ok(if negative { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from an `f64` (every finite double is a dyadic rational).
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::InvalidParameter(format!("non-finite value {x}")))
}

pub fn floor_to_u64(r: &Rational) -> Result<u64> {
    r.floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter(format!("{} does not fit in u64", format(r))))
}

pub fn ceil_to_u64(r: &Rational) -> Result<u64> {
    r.ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidParameter(format!("{} does not fit in u64", format(r))))
}

/// `floor(r * 2^128)` for `r` in `[0, 1)`.
pub fn to_fixed128(r: &Rational) -> Option<u128> {
    if r.is_negative() || *r >= Rational::one() {
        return None;
    }
    let scaled = r.numer().magnitude() << 128usize;
    let q = scaled / r.denom().magnitude();
    q.to_u128()
}

pub fn in_unit_open_closed(r: &Rational) -> bool {
    r.is_positive() && *r <= Rational::one()
}

pub fn in_unit_closed(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// 2-adic valuation of a nonzero rational.
pub fn dyadic_valuation(r: &Rational) -> Result<i64> {
    if r.is_zero() {
        return Err(Error::InvalidParameter("valuation of zero".into()));
    }
    let v = |n: &BigInt| -> i64 { n.magnitude().trailing_zeros().unwrap_or(0) as i64 };
    Ok(v(r.numer()) - v(r.denom()))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn biguint_to_rational(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

/// Serde adapter writing a rational as a `"p/q"` string.
pub mod as_string {
    use super::{format, parse, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = StringOrNumber::deserialize(d)?;
        let text = match raw {
            StringOrNumber::S(s) => s,
            StringOrNumber::N(n) => n.to_string(),
        };
        parse(&text).map_err(D::Error::custom)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum StringOrNumber {
        S(String),
        N(serde_json::Number),
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod vec_as_string {
    use super::{format, parse, Rational};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<serde_json::Value>::deserialize(d)?;
        raw.into_iter()
            .map(|v| {
                let text = match v {
                    serde_json::Value::String(s) => s,
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(D::Error::custom(format!("not a rational: {other}"))),
                };
                parse(&text).map_err(D::Error::custom)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_decimals_and_integers() {
        assert_eq!(parse("3/7").unwrap(), rat(3, 7));
        assert_eq!(parse("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse("0.35").unwrap(), rat(7, 20));
        assert_eq!(parse("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse("2").unwrap(), rat(2, 1));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(format(&rat(6, 8)), "3/4");
        assert_eq!(format(&rat(4, 2)), "2");
    }

    #[test]
    fn fixed_point_of_half() {
        assert_eq!(to_fixed128(&rat(1, 2)), Some(1u128 << 127));
        assert_eq!(to_fixed128(&rat(1, 1)), None);
        assert_eq!(to_fixed128(&rat(0, 1)), Some(0));
    }

    #[test]
    fn valuation() {
        assert_eq!(dyadic_valuation(&rat(4, 3)).unwrap(), 2);
        assert_eq!(dyadic_valuation(&rat(3, 10)).unwrap(), -1);
        assert_eq!(dyadic_valuation(&rat(3, 7)).unwrap(), 0);
    }
}
