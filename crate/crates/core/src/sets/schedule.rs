use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum GrowthLaw {
    /// `c(0) = seed`, `c(n+1) = round(ratio * c(n))`.
    Geometric {
        #[serde(with = "rational::as_string")]
        ratio: Rational,
        seed: u64,
    },
    /// `c(n) = base^(k²)` for `k = first, first + 1, ...`.
    SquaredExponent { base: u64, first: u32 },
    Explicit,
}

/// Strictly increasing list of checkpoints together with the law that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthSchedule {
    law: GrowthLaw,
    checkpoints: Vec<u64>,
}

fn round_half_up(r: &Rational) -> Result<u64> {
    let half = rational::rat(1, 2);
    rational::floor_to_u64(&(r + half))
        .map_err(|_| Error::InvalidSchedule("checkpoint exceeds u64".into()))
}

impl GrowthSchedule {
    pub fn geometric(ratio: Rational, depth: usize, seed: u64) -> Result<Self> {
        if ratio <= rational::rat(1, 1) {
            return Err(Error::InvalidSchedule(format!(
                "ratio {} must exceed 1",
                rational::format(&ratio)
            )));
        }
        if seed == 0 {
            return Err(Error::InvalidSchedule("seed must be positive".into()));
        }
        let mut cps = vec![seed];
        while cps.len() < depth {
            let next = round_half_up(&(&ratio * rational::from_u64(*cps.last().unwrap())))?;
            cps.push(next);
        }
        GrowthSchedule::checked(GrowthLaw::Geometric { ratio, seed }, cps, depth)
    }

    pub fn squared_exponent(base: u64, first: u32, depth: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::InvalidSchedule("base must be at least 2".into()));
        }
        let cps = (0..depth)
            .map(|i| {
                let k = first + i as u32;
                k.checked_mul(k)
                    .and_then(|e| base.checked_pow(e))
                    .ok_or_else(|| Error::InvalidSchedule(format!("{base}^({k}²) exceeds u64")))
            })
            .collect::<Result<Vec<_>>>()?;
        GrowthSchedule::checked(GrowthLaw::SquaredExponent { base, first }, cps, depth)
    }

    pub fn explicit(checkpoints: Vec<u64>) -> Result<Self> {
        let depth = checkpoints.len();
        GrowthSchedule::checked(GrowthLaw::Explicit, checkpoints, depth)
    }

    fn checked(law: GrowthLaw, checkpoints: Vec<u64>, depth: usize) -> Result<Self> {
        if depth < 2 {
            return Err(Error::InvalidSchedule(format!("depth {depth} < 2")));
        }
        if let Some(w) = checkpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSchedule(format!(
                "checkpoints not strictly increasing: {} then {}",
                w[0], w[1]
            )));
        }
        Ok(GrowthSchedule { law, checkpoints })
    }

    pub fn law(&self) -> &GrowthLaw {
        &self.law
    }

    pub fn checkpoints(&self) -> &[u64] {
        &self.checkpoints
    }

    pub fn depth(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn last(&self) -> u64 {
        *self.checkpoints.last().expect("depth >= 2")
    }

    /// The checkpoint the law would produce after the last one, if it fits in u64.
    pub fn next_checkpoint(&self) -> Option<u64> {
        match &self.law {
            GrowthLaw::Geometric { ratio, .. } => {
                round_half_up(&(ratio * rational::from_u64(self.last()))).ok()
            }
            GrowthLaw::SquaredExponent { base, first } => {
                let k = first + self.depth() as u32;
                k.checked_mul(k).and_then(|e| base.checked_pow(e))
            }
            GrowthLaw::Explicit => None,
        }
    }

    pub fn ratio_f64(&self) -> Option<f64> {
        match &self.law {
            GrowthLaw::Geometric { ratio, .. } => ratio.to_f64(),
            _ => None,
        }
    }
}
