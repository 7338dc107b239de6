use std::collections::HashMap;

use crate::{Error, Result};

/// Word inventory ordered by descending corpus frequency.
///
/// Ties in frequency are broken lexicographically, so building from the same
/// corpus yields the same indices on every platform. Vocabularies loaded from
/// interchange formats keep file order and carry zero counts, since neither
/// format stores frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Count every token of `corpus` and keep those seen at least `min_count`
    /// times.
    pub fn build<I, S, T>(corpus: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for sentence in corpus {
            for token in sentence {
                let token = token.as_ref();
                if let Some(c) = counts.get_mut(token) {
                    *c += 1;
                } else {
                    counts.insert(token.to_owned(), 1);
                }
            }
        }
        Self::from_counts(counts, min_count)
    }

    /// Build from precomputed frequencies.
    pub fn from_counts(counts: HashMap<String, u64>, min_count: u64) -> Result<Self> {
        let mut entries: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count.max(1))
            .collect();
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

        let total_tokens = entries.iter().map(|e| e.1).sum();
        let (words, counts): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        Ok(Vocabulary {
            words,
            counts,
            index,
            total_tokens,
        })
    }

    /// Vocabulary in the given order with unknown (zero) counts.
    pub fn from_words(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::DuplicateWord(w.clone()));
            }
        }
        let counts = vec![0; words.len()];
        Ok(Vocabulary {
            words,
            counts,
            index,
            total_tokens: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn word(&self, idx: usize) -> &str {
        &self.words[idx]
    }

    pub fn count(&self, idx: usize) -> u64 {
        self.counts[idx]
    }

    /// Sum of the counts of retained words.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    /// Exact lookup.
    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Exact lookup, falling back to the lowercased token.
    pub fn resolve(&self, token: &str) -> Option<usize> {
        self.get(token).or_else(|| {
            let lower = token.to_lowercase();
            if lower != token {
                self.get(&lower)
            } else {
                None
            }
        })
    }
}
