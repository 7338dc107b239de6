//! Building, training, and exploring static word embeddings.
//!
//! The crate covers the whole offline pipeline:
//!
//! * [`corpus`]: WARC parsing, HTML text extraction, n-gram language
//!   identification, line deduplication, and tokenization.
//! * [`trainer`]: CBoW word2vec training with negative sampling.
//! * [`store`]: text and binary word2vec formats plus the unit-normalized
//!   view used by every similarity query.
//! * [`analogy`], [`query`]: 3CosAdd analogy solving and evaluation,
//!   cosine similarity, and exact nearest neighbors.
//! * [`viz`]: k-means and exact t-SNE for neighborhood scatter plots.
//! * [`probe`]: the ESIM local-inference block, a tanh classification head,
//!   and a bag-of-embeddings logistic probe.

pub mod analogy;
pub mod corpus;
pub mod embedding;
mod error;
pub mod probe;
pub mod query;
pub mod store;
pub mod trainer;
pub mod viz;

pub use embedding::EmbeddingSet;
pub use error::{Error, Result};
pub use store::NormalizedView;
pub use trainer::{TrainingConfig, Vocabulary};
