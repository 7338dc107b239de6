//! Cosine similarity and exact nearest-neighbor search over a
//! [`NormalizedView`].

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, NormalizedView, Result};

/// A ranked result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub word: String,
    pub score: f64,
}

const PARALLEL_MIN_VALUES: usize = 1 << 20;

fn dot(a: &[f32], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| x as f64 * y).sum()
}

/// Descending score, then ascending vocabulary index.
fn rank_order(a: &(usize, f64), b: &(usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// The `k` rows most cosine-similar to `target`, skipping `exclude`, zero
/// rows, and (when `cap` is set) every index `>= cap`.
///
/// `target` need not be normalized. A zero target scores every row 0, so
/// the result is the first `k` eligible rows by index.
pub fn rank_by_target(
    view: &NormalizedView,
    target: &[f64],
    exclude: &[usize],
    k: usize,
    cap: Option<usize>,
) -> Vec<(usize, f64)> {
    let norm = target.iter().map(|v| v * v).sum::<f64>().sqrt();
    let inv = if norm > 0.0 { 1.0 / norm } else { 0.0 };
    rank_scaled(view, target, inv, exclude, k, cap)
}

fn rank_scaled(
    view: &NormalizedView,
    target: &[f64],
    inv: f64,
    exclude: &[usize],
    k: usize,
    cap: Option<usize>,
) -> Vec<(usize, f64)> {
    let limit = cap.unwrap_or(usize::MAX).min(view.len());
    let eligible = |i: usize| view.is_searchable(i) && !exclude.contains(&i);
    let score = |i: usize| (i, (dot(view.unit(i), target) * inv).clamp(-1.0, 1.0));

    let mut scored: Vec<(usize, f64)> = if limit * view.dim() >= PARALLEL_MIN_VALUES {
        (0..limit)
            .into_par_iter()
            .filter(|&i| eligible(i))
            .map(score)
            .collect()
    } else {
        (0..limit).filter(|&i| eligible(i)).map(score).collect()
    };

    if k == 0 {
        return Vec::new();
    }
    if k < scored.len() {
        scored.select_nth_unstable_by(k - 1, rank_order);
        scored.truncate(k);
    }
    scored.sort_unstable_by(rank_order);
    scored
}

pub(crate) fn to_scored(view: &NormalizedView, ranked: Vec<(usize, f64)>) -> Vec<Scored> {
    ranked
        .into_iter()
        .map(|(i, score)| Scored {
            word: view.vocab().word(i).to_owned(),
            score,
        })
        .collect()
}

/// Cosine similarity of two words. A word compared with itself scores
/// exactly 1; a zero vector scores 0 against everything.
pub fn cosine(view: &NormalizedView, w1: &str, w2: &str) -> Result<f64> {
    let i = view.resolve(w1)?;
    let j = view.resolve(w2)?;
    Ok(cosine_index(view, i, j))
}

pub fn cosine_index(view: &NormalizedView, i: usize, j: usize) -> f64 {
    if !view.is_searchable(i) || !view.is_searchable(j) {
        return 0.0;
    }
    if i == j {
        return 1.0;
    }
    view.unit(i)
        .iter()
        .zip(view.unit(j))
        .map(|(&a, &b)| a as f64 * b as f64)
        .sum::<f64>()
        .clamp(-1.0, 1.0)
}

/// Indices of the `k` nearest neighbors of row `idx`, excluding itself.
/// Scores are bit-identical to [`cosine_index`].
pub fn neighbors_index(view: &NormalizedView, idx: usize, k: usize) -> Vec<(usize, f64)> {
    if !view.is_searchable(idx) {
        return Vec::new();
    }
    let target: Vec<f64> = view.unit(idx).iter().map(|&v| v as f64).collect();
    rank_scaled(view, &target, 1.0, &[idx], k, None)
}

/// The `k` words most similar to `word`, excluding `word` itself. Asking for
/// more neighbors than exist returns all of them.
pub fn neighbors(view: &NormalizedView, word: &str, k: usize) -> Result<Vec<Scored>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let idx = view.resolve(word)?;
    Ok(to_scored(view, neighbors_index(view, idx, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trainer::Vocabulary;
    use crate::EmbeddingSet;

    fn view(words: &[&str], dim: usize, values: Vec<f32>) -> NormalizedView {
        let vocab = Vocabulary::from_words(words.iter().map(|w| w.to_string()).collect()).unwrap();
        NormalizedView::new(&EmbeddingSet::new(vocab, dim, values).unwrap())
    }

    #[test]
    fn cosine_examples() {
        let v = view(&["x", "y", "d"], 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(cosine(&v, "x", "x").unwrap(), 1.0);
        assert_eq!(cosine(&v, "x", "y").unwrap(), 0.0);
        assert!((cosine(&v, "x", "d").unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
        assert!(matches!(cosine(&v, "x", "nope"), Err(Error::OovWord(w)) if w == "nope"));
    }

    #[test]
    fn three_word_ranking_by_hand() {
        // cos(a,b) = 0.8, cos(a,c) = 0, cos(b,c) = 0.6
        let v = view(&["a", "b", "c"], 2, vec![1.0, 0.0, 0.8, 0.6, 0.0, 2.0]);
        let r = neighbors(&v, "a", 2).unwrap();
        assert_eq!(r[0].word, "b");
        assert!((r[0].score - 0.8).abs() < 1e-6);
        assert_eq!(r[1].word, "c");
        assert!(r[1].score.abs() < 1e-7);
        let r = neighbors(&v, "c", 2).unwrap();
        assert_eq!((r[0].word.as_str(), r[1].word.as_str()), ("b", "a"));
        assert!((r[0].score - 0.6).abs() < 1e-6);
    }

    #[test]
    fn k_covering_vocab_returns_all_others() {
        let v = view(&["a", "b", "c"], 1, vec![1.0, 2.0, -1.0]);
        let r = neighbors(&v, "a", 2).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(neighbors(&v, "a", 10).unwrap().len(), 2);
        assert!(neighbors(&v, "a", 0).is_err());
    }

    #[test]
    fn ties_broken_by_index() {
        let v = view(&["q", "d2", "d1", "d3"], 1, vec![1.0, 1.0, 1.0, 1.0]);
        let r = neighbors(&v, "q", 3).unwrap();
        let words: Vec<_> = r.iter().map(|s| s.word.as_str()).collect();
        assert_eq!(words, ["d2", "d1", "d3"]);
    }

    #[test]
    fn zero_rows_never_returned() {
        let v = view(&["a", "z", "b"], 1, vec![1.0, 0.0, 1.0]);
        let r = neighbors(&v, "a", 5).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].word, "b");
    }
}
