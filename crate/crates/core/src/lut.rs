//! 2^24-entry lookup table over all RGB values.
//!
//! The table is a 2 MiB bitset built from a scalar predicate, so mask
//! building degenerates to one indexed load per pixel. Build it once and
//! share it; `verify_sample` spot-checks the table against the predicate
//! it was built from.

use rayon::prelude::*;

use crate::color::Rgb8;
use crate::rules::SkinRule;

const TABLE_BITS: usize = 1 << 24;
const TABLE_WORDS: usize = TABLE_BITS / 64;

pub struct SkinLut {
    words: Vec<u64>,
}

#[inline]
fn index(p: Rgb8) -> usize {
    ((p.r as usize) << 16) | ((p.g as usize) << 8) | p.b as usize
}

#[inline]
fn pixel_at(index: usize) -> Rgb8 {
    Rgb8::new((index >> 16) as u8, (index >> 8) as u8, index as u8)
}

impl SkinLut {
    /// Evaluates `rule` on every RGB value. Word-parallel; deterministic.
    pub fn build(rule: &dyn SkinRule) -> Self {
        let mut words = vec![0u64; TABLE_WORDS];
        words.par_iter_mut().enumerate().for_each(|(w, word)| {
            let base = w << 6;
            let mut bits = 0u64;
            for bit in 0..64 {
                if rule.is_skin(pixel_at(base | bit)) {
                    bits |= 1 << bit;
                }
            }
            *word = bits;
        });
        SkinLut { words }
    }

    #[inline]
    pub fn is_skin(&self, p: Rgb8) -> bool {
        let i = index(p);
        self.words[i >> 6] & (1 << (i & 63)) != 0
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Checks `samples` deterministically-spread table entries against the
    /// scalar predicate; returns the first mismatching pixel, if any.
    pub fn verify_sample(&self, rule: &dyn SkinRule, samples: usize) -> Result<(), Rgb8> {
        let samples = samples.clamp(1, TABLE_BITS);
        let stride = TABLE_BITS / samples;
        for k in 0..samples {
            let p = pixel_at(k * stride);
            if self.is_skin(p) != rule.is_skin(p) {
                return Err(p);
            }
        }
        Ok(())
    }
}

impl SkinRule for SkinLut {
    fn is_skin(&self, p: Rgb8) -> bool {
        SkinLut::is_skin(self, p)
    }
}
