//! Downstream-evaluation building blocks: the ESIM local-inference block,
//! the tanh classification head, and a bag-of-embeddings logistic probe
//! for comparing embedding sets on labeled sentences.

pub mod esim;
mod head;
mod logistic;

pub use esim::{
    attention_matrix, enhance, local_inference, local_relevance, pool_features, softmax_rows,
    EncodedPair, LocalInference,
};
pub use head::{classification_head, projection, HeadParams, Mode, DROPOUT_RATE};
pub use logistic::{
    embed_bag, evaluate_probe, load_tsv, parse_tsv, train_on_features, train_probe, BagVector,
    LabeledSentence, ProbeConfig, ProbeModel,
};
