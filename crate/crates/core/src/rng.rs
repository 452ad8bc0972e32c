//! Seeded substreams.
//!
//! Every random draw comes from a ChaCha8 stream selected by `(seed, index)`,
//! where the index is a block number or a trial number. Results therefore do
//! not depend on how work is split across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const SEED_ENV: &str = "DENSITY_LAB_SEED";

/// Stream `index` of the generator keyed by `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Keeps an element when its 32-bit draw falls below this threshold.
pub fn keep_threshold(p: f64) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok((p * 4_294_967_296.0).round() as u64)
}

const DRAW_CHUNK: usize = 4096;

/// Bernoulli decisions for `count` consecutive elements of one stream.
pub struct Coin {
    rng: ChaCha8Rng,
    threshold: u64,
    buf: Vec<u32>,
    pos: usize,
}

impl Coin {
    pub fn new(seed: u64, index: u64, p: f64) -> Result<Self> {
        Ok(Coin { rng: substream(seed, index), threshold: keep_threshold(p)?, buf: vec![0; DRAW_CHUNK], pos: DRAW_CHUNK })
    }

    #[inline]
    pub fn flip(&mut self) -> bool {
        if self.pos == DRAW_CHUNK {
            self.rng.fill(&mut self.buf[..]);
            self.pos = 0;
        }
        let v = self.buf[self.pos];
        self.pos += 1;
        (v as u64) < self.threshold
    }
}

/// An explicit seed wins; otherwise the environment variable, if set and valid.
pub fn resolve_seed(explicit: Option<u64>) -> Result<Option<u64>> {
    if explicit.is_some() {
        return Ok(explicit);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not a 64-bit unsigned integer"))),
        Err(_) => Ok(None),
    }
}
