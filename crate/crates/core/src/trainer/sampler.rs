use rand::Rng;

use crate::{Error, Result};

/// Unigram distribution raised to the 3/4 power, sampled by inverse CDF.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    pub const POWER: f64 = 0.75;

    pub fn new(counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let weights: Vec<f64> = counts
            .iter()
            .map(|&c| (c.max(1) as f64).powf(Self::POWER))
            .collect();
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(NegativeSampler { cumulative })
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let idx = self.cumulative.partition_point(|&c| c <= u);
        idx.min(self.cumulative.len() - 1)
    }
}

/// Probability of keeping one occurrence of a word with relative frequency
/// `freq` under subsampling threshold `t`: `(sqrt(f/t) + 1) * t/f`, clamped
/// to `[0, 1]`.
pub fn keep_probability(freq: f64, t: f64) -> Result<f64> {
    if !(freq > 0.0 && freq <= 1.0) {
        return Err(Error::InvalidFrequency(freq));
    }
    let ratio = t / freq;
    Ok((((1.0 / ratio).sqrt() + 1.0) * ratio).clamp(0.0, 1.0))
}
