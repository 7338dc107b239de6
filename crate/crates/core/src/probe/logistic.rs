use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::tokenize;
use crate::{EmbeddingSet, Error, Result};

/// Mean of the in-vocabulary token vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct BagVector {
    pub values: Vec<f64>,
    /// Tokens that had a vector; zero means `values` is the zero vector.
    pub in_vocab: usize,
}

impl BagVector {
    pub fn is_empty(&self) -> bool {
        self.in_vocab == 0
    }
}

pub fn embed_bag<S: AsRef<str>>(tokens: &[S], emb: &EmbeddingSet) -> BagVector {
    let mut values = vec![0.0; emb.dim()];
    let mut in_vocab = 0;
    for t in tokens {
        if let Some(v) = emb.lookup(t.as_ref()) {
            in_vocab += 1;
            for (acc, &x) in values.iter_mut().zip(v) {
                *acc += x as f64;
            }
        }
    }
    if in_vocab > 0 {
        let inv = 1.0 / in_vocab as f64;
        values.iter_mut().for_each(|v| *v *= inv);
    }
    BagVector { values, in_vocab }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSentence {
    pub label: bool,
    pub tokens: Vec<String>,
}

impl LabeledSentence {
    pub fn new(label: bool, sentence: &str) -> Self {
        LabeledSentence {
            label,
            tokens: tokenize(sentence, false),
        }
    }
}

fn parse_label(raw: &str) -> Option<bool> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "1" | "pos" | "positive" | "true" => Some(true),
        "0" | "neg" | "negative" | "false" => Some(false),
        _ => None,
    }
}

/// `label<TAB>sentence` rows; labels are `0`/`1` (or `neg`/`pos`).
pub fn parse_tsv(text: &str) -> Result<Vec<LabeledSentence>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (label, sentence) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(i + 1, "expected label<TAB>sentence"))?;
        let label = parse_label(label)
            .ok_or_else(|| Error::format(i + 1, format!("unknown label {label:?}")))?;
        out.push(LabeledSentence::new(label, sentence));
    }
    Ok(out)
}

pub fn load_tsv(path: &Path) -> Result<Vec<LabeledSentence>> {
    parse_tsv(&fs::read_to_string(path).map_err(|e| Error::path(path, e))?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub epochs: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            epochs: 200,
            lr: 0.5,
            seed: 7,
        }
    }
}

/// Logistic regression over standardized bag-of-embeddings features.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-feature shift and scale fitted on the training set.
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// Training loss before the first step and after each step.
    pub loss_history: Vec<f64>,
}

impl ProbeModel {
    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    pub fn logit(&self, features: &[f64]) -> f64 {
        let z = self.standardize(features);
        z.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias
    }

    pub fn predict(&self, features: &[f64]) -> bool {
        self.logit(features) > 0.0
    }
}

fn mean_log_loss(x: &[Vec<f64>], y: &[f64], w: &[f64], b: f64) -> f64 {
    let total: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, &yi)| {
            let z = xi.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b;
            // log(1 + e^z) - y z
            z.max(0.0) + (-z.abs()).exp().ln_1p() - yi * z
        })
        .sum();
    total / x.len() as f64
}

fn gradient(x: &[Vec<f64>], y: &[f64], w: &[f64], b: f64) -> (Vec<f64>, f64) {
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (xi, &yi) in x.iter().zip(y) {
        let z = xi.iter().zip(w).map(|(a, c)| a * c).sum::<f64>() + b;
        let r = crate::trainer::sigmoid_f64(z) - yi;
        for (g, &v) in gw.iter_mut().zip(xi) {
            *g += r * v;
        }
        gb += r;
    }
    let inv = 1.0 / x.len() as f64;
    gw.iter_mut().for_each(|g| *g *= inv);
    (gw, gb * inv)
}

/// Full-batch gradient descent on the mean logistic loss. A step that would
/// raise the loss is retried with half the learning rate, so the recorded
/// loss never increases.
pub fn train_probe(
    data: &[LabeledSentence],
    emb: &EmbeddingSet,
    config: &ProbeConfig,
) -> Result<ProbeModel> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    let positives = data.iter().filter(|s| s.label).count();
    if positives == 0 || positives == data.len() {
        return Err(Error::DegenerateLabels);
    }
    let raw: Vec<Vec<f64>> = data
        .iter()
        .map(|s| embed_bag(&s.tokens, emb).values)
        .collect();
    let y: Vec<f64> = data
        .iter()
        .map(|s| if s.label { 1.0 } else { 0.0 })
        .collect();
    train_on_features(&raw, &y, config)
}

/// [`train_probe`] on precomputed feature vectors with 0/1 targets.
pub fn train_on_features(raw: &[Vec<f64>], y: &[f64], config: &ProbeConfig) -> Result<ProbeModel> {
    let d = raw.first().map_or(0, Vec::len);
    let n = raw.len() as f64;
    let mean: Vec<f64> = (0..d)
        .map(|j| raw.iter().map(|r| r[j]).sum::<f64>() / n)
        .collect();
    let scale: Vec<f64> = (0..d)
        .map(|j| {
            let var = raw.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
            if var > 1e-24 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let mut model = ProbeModel {
        weights: vec![0.0; d],
        bias: 0.0,
        mean,
        scale,
        loss_history: Vec::new(),
    };
    let x: Vec<Vec<f64>> = raw.iter().map(|r| model.standardize(r)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut w: Vec<f64> = (0..d).map(|_| rng.random_range(-0.01..0.01)).collect();
    let mut b = 0.0;
    let mut lr = config.lr;
    let mut loss = mean_log_loss(&x, y, &w, b);
    model.loss_history.push(loss);
    for _ in 0..config.epochs {
        let (gw, gb) = gradient(&x, y, &w, b);
        loop {
            let cand_w: Vec<f64> = w.iter().zip(&gw).map(|(wi, gi)| wi - lr * gi).collect();
            let cand_b = b - lr * gb;
            let cand_loss = mean_log_loss(&x, y, &cand_w, cand_b);
            if cand_loss <= loss || lr < 1e-12 {
                if cand_loss <= loss {
                    w = cand_w;
                    b = cand_b;
                    loss = cand_loss;
                }
                break;
            }
            lr *= 0.5;
        }
        model.loss_history.push(loss);
    }
    model.weights = w;
    model.bias = b;
    Ok(model)
}

pub fn evaluate_probe(model: &ProbeModel, data: &[LabeledSentence], emb: &EmbeddingSet) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    let correct = data
        .iter()
        .filter(|s| model.predict(&embed_bag(&s.tokens, emb).values) == s.label)
        .count();
    correct as f64 / data.len() as f64
}
