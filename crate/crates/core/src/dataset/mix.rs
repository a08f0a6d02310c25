use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DatasetError, PairRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthBucket {
    Short,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixConfig {
    /// Inclusive upper bound of the short bucket.
    pub short_max: usize,
    /// Inclusive upper bound of the long bucket; longer items are dropped.
    pub long_max: usize,
    /// Short items emitted per long item.
    pub ratio: usize,
    /// Shuffle each bucket with the seed before interleaving.
    pub shuffle: bool,
}

impl Default for MixConfig {
    fn default() -> Self {
        MixConfig {
            short_max: 2048,
            long_max: 4096,
            ratio: 3,
            shuffle: false,
        }
    }
}

impl MixConfig {
    pub fn bucket(&self, tokens: usize) -> Option<LengthBucket> {
        if tokens <= self.short_max {
            Some(LengthBucket::Short)
        } else if tokens <= self.long_max {
            Some(LengthBucket::Long)
        } else {
            None
        }
    }
}

/// Interleaves `ratio` short items with one long item per group and stops at
/// the first incomplete group. If either bucket is empty from the start the
/// other is returned unchanged.
pub fn mix_by_length<T>(items: Vec<(T, usize)>, config: &MixConfig, seed: u64) -> Vec<T> {
    let mut short = Vec::new();
    let mut long = Vec::new();
    for (item, tokens) in items {
        match config.bucket(tokens) {
            Some(LengthBucket::Short) => short.push(item),
            Some(LengthBucket::Long) => long.push(item),
            None => {}
        }
    }
    if config.shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        short.shuffle(&mut rng);
        long.shuffle(&mut rng);
    }
    if short.is_empty() {
        return long;
    }
    if long.is_empty() {
        return short;
    }
    let ratio = config.ratio.max(1);
    let groups = (short.len() / ratio).min(long.len());
    let mut out = Vec::with_capacity(groups * (ratio + 1));
    let mut short = short.into_iter();
    let mut long = long.into_iter();
    for _ in 0..groups {
        out.extend(short.by_ref().take(ratio));
        out.extend(long.next());
    }
    out
}

/// [`mix_by_length`] on whole records, sized by [`PairRecord::token_count`].
pub fn sample_mix(records: Vec<PairRecord>, seed: u64) -> Result<Vec<PairRecord>, DatasetError> {
    let sized = records
        .into_iter()
        .map(|r| r.token_count().map(|n| (r, n)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(mix_by_length(sized, &MixConfig::default(), seed))
}
