//! CBoW word2vec training with negative sampling.

mod cbow;
mod sampler;
mod train;
mod vocab;

pub use cbow::{cbow_update, AtomicRows, DenseRows, ParamRows, Scratch};
pub use sampler::{keep_probability, NegativeSampler};
pub use train::{read_corpus, train, train_sentences, Progress, ProgressFn};
pub use vocab::Vocabulary;

pub(crate) fn sigmoid_f64(x: f64) -> f64 {
    cbow::sigmoid(x)
}

use serde::{Deserialize, Serialize};

use crate::{EmbeddingSet, Error, Result};

/// Hyperparameters. Defaults follow the usual word2vec CBoW settings; the
/// four reference configurations differ only in `window` and `min_count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrainingConfig {
    pub dim: usize,
    pub window: usize,
    pub min_count: u64,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub subsample_t: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            dim: 300,
            window: 5,
            min_count: 5,
            negatives: 5,
            epochs: 5,
            lr_start: 0.025,
            lr_end: 1e-4,
            subsample_t: 1e-3,
            seed: 42,
            workers: 1,
        }
    }
}

impl TrainingConfig {
    /// Window 5, min_count 60.
    pub fn narrow_window() -> Self {
        TrainingConfig {
            window: 5,
            min_count: 60,
            ..Default::default()
        }
    }

    /// Window 20, min_count 5.
    pub fn wide_window() -> Self {
        TrainingConfig {
            window: 20,
            min_count: 5,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.to_owned()));
        if self.dim < 1 {
            return fail("dim must be >= 1");
        }
        if self.window < 1 {
            return fail("window must be >= 1");
        }
        if self.min_count < 1 {
            return fail("min_count must be >= 1");
        }
        if self.negatives < 1 {
            return fail("negatives must be >= 1");
        }
        if !(self.lr_start > self.lr_end && self.lr_end > 0.0) {
            return fail("learning rates must satisfy lr_start > lr_end > 0");
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
        let bad_t = !(self.subsample_t > 0.0);
        if bad_t {
            return fail("subsample_t must be > 0");
        }
        if self.workers < 1 {
            return fail("workers must be >= 1");
        }
        Ok(())
    }
}

/// One SGD step on `emb`'s input and context matrices; see [`cbow_update`].
pub fn cbow_step(
    emb: &mut EmbeddingSet,
    context: &[usize],
    target: usize,
    negatives: &[usize],
    lr: f32,
) -> Result<f32> {
    let v = emb.len();
    if let Some(&bad) = context
        .iter()
        .chain(negatives)
        .chain(std::iter::once(&target))
        .find(|&&i| i >= v)
    {
        return Err(Error::InvalidArgument(format!(
            "word index {bad} out of range for vocabulary of {v}"
        )));
    }
    if negatives.contains(&target) {
        return Err(Error::InvalidArgument(
            "target index appears among negatives".into(),
        ));
    }
    let dim = emb.dim();
    let (input, output) = emb.matrices_mut()?;
    Ok(cbow_update(
        &mut DenseRows::new(input, dim),
        &mut DenseRows::new(output, dim),
        context,
        target,
        negatives,
        lr,
        &mut Scratch::new(dim),
    ))
}
