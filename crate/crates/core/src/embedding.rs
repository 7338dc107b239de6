//! The vocabulary-plus-matrix object exchanged between every stage.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::trainer::Vocabulary;
use crate::{Error, Result};

/// A vocabulary with one input vector per word, stored row-major.
///
/// During training a second matrix of context (output) vectors is carried
/// along; it is dropped when the set is published or saved.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    vocab: Vocabulary,
    dim: usize,
    input: Vec<f32>,
    context: Option<Vec<f32>>,
}

impl EmbeddingSet {
    pub fn new(vocab: Vocabulary, dim: usize, input: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig(
                "embedding dimension must be >= 1".into(),
            ));
        }
        if input.len() != vocab.len() * dim {
            return Err(Error::Shape(format!(
                "matrix has {} values, expected {} x {}",
                input.len(),
                vocab.len(),
                dim
            )));
        }
        if let Some(pos) = input.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value for word {:?}",
                vocab.word(pos / dim)
            )));
        }
        Ok(EmbeddingSet {
            vocab,
            dim,
            input,
            context: None,
        })
    }

    /// Attach a context matrix of the same shape as the input matrix.
    pub fn with_context(mut self, context: Vec<f32>) -> Result<Self> {
        if context.len() != self.input.len() {
            return Err(Error::Shape(
                "context matrix shape differs from input".into(),
            ));
        }
        self.context = Some(context);
        Ok(self)
    }

    /// Training initialization: input vectors uniform in `±0.5/dim`, context
    /// vectors zero. A pure function of `(vocab, dim, seed)`.
    pub fn initialize(vocab: Vocabulary, dim: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 0.5 / dim.max(1) as f32;
        let input = (0..vocab.len() * dim)
            .map(|_| rng.random_range(-bound..bound))
            .collect();
        let context = vec![0.0; vocab.len() * dim];
        EmbeddingSet::new(vocab, dim, input)?.with_context(context)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn vector(&self, idx: usize) -> &[f32] {
        &self.input[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Vector of `token` under the exact-then-lowercase lookup policy.
    pub fn lookup(&self, token: &str) -> Option<&[f32]> {
        self.vocab.resolve(token).map(|i| self.vector(i))
    }

    pub fn input_matrix(&self) -> &[f32] {
        &self.input
    }

    pub fn context_matrix(&self) -> Option<&[f32]> {
        self.context.as_deref()
    }

    /// Both matrices, mutably. Fails if no context matrix is attached.
    pub fn matrices_mut(&mut self) -> Result<(&mut [f32], &mut [f32])> {
        match self.context.as_mut() {
            Some(ctx) => Ok((&mut self.input, ctx)),
            None => Err(Error::InvalidArgument(
                "embedding set has no context matrix".into(),
            )),
        }
    }

    /// Drop the training-only context matrix.
    pub fn into_published(mut self) -> Self {
        self.context = None;
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.vocab
            .words()
            .iter()
            .map(String::as_str)
            .zip(self.input.chunks_exact(self.dim))
    }
}
