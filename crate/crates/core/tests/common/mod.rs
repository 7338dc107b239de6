//! Generated corpora and fixtures shared by the integration tests.
#![allow(dead_code)]

use motvec_core::probe::LabeledSentence;
use motvec_core::{EmbeddingSet, Vocabulary};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SYNONYM_PAIRS: [(&str, &str); 20] = [
    ("chat", "chien"),
    ("voiture", "camion"),
    ("maison", "appartement"),
    ("rouge", "bleu"),
    ("lundi", "mardi"),
    ("paris", "lyon"),
    ("pomme", "poire"),
    ("homme", "femme"),
    ("roi", "reine"),
    ("table", "chaise"),
    ("livre", "cahier"),
    ("soleil", "lune"),
    ("vin", "bière"),
    ("train", "avion"),
    ("mer", "océan"),
    ("père", "mère"),
    ("fleur", "arbre"),
    ("piano", "guitare"),
    ("médecin", "infirmier"),
    ("football", "rugby"),
];

const SYLLABLES: [&str; 24] = [
    "ba", "de", "fi", "go", "lu", "ma", "ne", "po", "ri", "sa", "te", "vo", "cha", "gre", "pli",
    "tro", "bou", "lan", "mi", "non", "qui", "ser", "tin", "zu",
];

/// `n` distinct pseudo-words, stable for a given `salt`.
pub fn pseudo_words(n: usize, salt: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(salt);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let len = rng.random_range(2..=4);
        let w: String = (0..len)
            .map(|_| *SYLLABLES.choose(&mut rng).unwrap())
            .collect();
        if seen.insert(w.clone()) && !SYNONYM_PAIRS.iter().any(|(a, b)| *a == w || *b == w) {
            out.push(w);
        }
    }
    out
}

/// Template corpus of roughly `target_bytes` in which the two words of each
/// planted pair fill the same slot, surrounded by context words private to
/// that pair and by shared filler.
pub fn synonym_corpus(target_bytes: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = pseudo_words(20 * 8 + 200, 0xC0FFEE);
    let (topic, filler) = words.split_at(20 * 8);
    let mut bytes = 0;
    let mut out = Vec::new();
    while bytes < target_bytes {
        let p = rng.random_range(0..SYNONYM_PAIRS.len());
        let ctx = &topic[p * 8..(p + 1) * 8];
        let (a, b) = SYNONYM_PAIRS[p];
        let slot = if rng.random_bool(0.5) { a } else { b };
        let mut s: Vec<String> = Vec::with_capacity(10);
        s.push(filler.choose(&mut rng).unwrap().clone());
        for _ in 0..3 {
            s.push(ctx.choose(&mut rng).unwrap().clone());
        }
        s.push(slot.to_owned());
        for _ in 0..3 {
            s.push(ctx.choose(&mut rng).unwrap().clone());
        }
        s.push(filler.choose(&mut rng).unwrap().clone());
        s.push(filler.choose(&mut rng).unwrap().clone());
        bytes += s.iter().map(|w| w.len() + 1).sum::<usize>();
        out.push(s);
    }
    out
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

pub fn dense_cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
    let na: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Polarity lexicon plus neutral words for the planted-sentiment task.
pub struct SentimentLexicon {
    pub positive: Vec<String>,
    pub negative: Vec<String>,
    pub neutral: Vec<String>,
}

/// Words `0..TRAIN_SPLIT` of each polarity appear in labeled training
/// sentences; the rest only in the held-out test set.
pub const TRAIN_SPLIT: usize = 20;

impl SentimentLexicon {
    pub fn new() -> Self {
        let words = pseudo_words(60 + 60 + 150, 0x5E47);
        SentimentLexicon {
            positive: words[..60].to_vec(),
            negative: words[60..120].to_vec(),
            neutral: words[120..].to_vec(),
        }
    }

    /// Unlabeled text where words of one polarity co-occur with each other.
    pub fn corpus(&self, sentences: usize, seed: u64) -> Vec<Vec<String>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..sentences)
            .map(|_| {
                let pool = if rng.random_bool(0.5) {
                    &self.positive
                } else {
                    &self.negative
                };
                let mut s: Vec<String> = (0..3)
                    .map(|_| pool.choose(&mut rng).unwrap().clone())
                    .collect();
                s.extend((0..5).map(|_| self.neutral.choose(&mut rng).unwrap().clone()));
                let pos = rng.random_range(0..s.len());
                s.swap(0, pos);
                s
            })
            .collect()
    }

    fn labeled(&self, n: usize, held_out: bool, rng: &mut ChaCha8Rng) -> Vec<LabeledSentence> {
        let range = if held_out {
            TRAIN_SPLIT..60
        } else {
            0..TRAIN_SPLIT
        };
        (0..n)
            .map(|_| {
                let label = rng.random_bool(0.5);
                let pool = if label {
                    &self.positive
                } else {
                    &self.negative
                };
                let mut words: Vec<&str> = (0..2)
                    .map(|_| pool[rng.random_range(range.clone())].as_str())
                    .collect();
                words.extend((0..4).map(|_| self.neutral.choose(rng).unwrap().as_str()));
                LabeledSentence::new(label, &words.join(" "))
            })
            .collect()
    }

    /// `(train, test)`; the test set uses only held-out polarity words.
    pub fn splits(
        &self,
        n_train: usize,
        n_test: usize,
        seed: u64,
    ) -> (Vec<LabeledSentence>, Vec<LabeledSentence>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
        let train = self.labeled(n_train, false, &mut rng);
        let test = self.labeled(n_test, true, &mut rng);
        (train, test)
    }
}

/// Random `v x d` embedding set over words `w0..`, entries in [-1, 1).
pub fn random_embeddings(v: usize, d: usize, rng: &mut impl Rng) -> EmbeddingSet {
    let words = (0..v).map(|i| format!("w{i}")).collect();
    let vocab = Vocabulary::from_words(words).unwrap();
    let data = (0..v * d).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    EmbeddingSet::new(vocab, d, data).unwrap()
}
