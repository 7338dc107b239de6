//! Word-analogy evaluation with 3CosAdd.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::query::{rank_by_target, to_scored, Scored};
use crate::{Error, NormalizedView, Result};

/// `a : b :: c : expected`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalogyQuestion {
    pub a: String,
    pub b: String,
    pub c: String,
    pub expected: String,
    pub category: String,
}

/// Category assigned to questions that precede any `: name` line.
pub const DEFAULT_CATEGORY: &str = "default";

/// Parse the standard analogy layout: `: category` lines followed by
/// questions of four whitespace-separated tokens.
pub fn parse_questions_str(text: &str) -> Result<Vec<AnalogyQuestion>> {
    let mut category = DEFAULT_CATEGORY.to_owned();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix(':') {
            category = name.trim().to_owned();
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [a, b, c, d] = tokens[..] else {
            return Err(Error::format(
                i + 1,
                format!("expected 4 tokens, found {}", tokens.len()),
            ));
        };
        out.push(AnalogyQuestion {
            a: a.to_owned(),
            b: b.to_owned(),
            c: c.to_owned(),
            expected: d.to_owned(),
            category: category.clone(),
        });
    }
    Ok(out)
}

pub fn parse_questions(path: &Path) -> Result<Vec<AnalogyQuestion>> {
    let text = fs::read_to_string(path).map_err(|e| Error::path(path, e))?;
    parse_questions_str(&text)
}

/// Options shared by [`solve_analogy`] and [`evaluate`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Only the `cap` most frequent words are candidates.
    pub candidate_cap: Option<usize>,
}

fn solve_indices(
    view: &NormalizedView,
    [a, b, c]: [usize; 3],
    k: usize,
    opts: SolveOptions,
) -> Vec<(usize, f64)> {
    let (ua, ub, uc) = (view.unit(a), view.unit(b), view.unit(c));
    let target: Vec<f64> = (0..view.dim())
        .map(|d| ub[d] as f64 - ua[d] as f64 + uc[d] as f64)
        .collect();
    rank_by_target(view, &target, &[a, b, c], k, opts.candidate_cap)
}

/// Words ranked by cosine to `x_b - x_a + x_c` over unit vectors, with the
/// three query words excluded.
pub fn solve_analogy(
    view: &NormalizedView,
    a: &str,
    b: &str,
    c: &str,
    k: usize,
) -> Result<Vec<Scored>> {
    solve_analogy_with(view, a, b, c, k, SolveOptions::default())
}

pub fn solve_analogy_with(
    view: &NormalizedView,
    a: &str,
    b: &str,
    c: &str,
    k: usize,
    opts: SolveOptions,
) -> Result<Vec<Scored>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let idx = [view.resolve(a)?, view.resolve(b)?, view.resolve(c)?];
    Ok(to_scored(view, solve_indices(view, idx, k, opts)))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CategoryCounts {
    pub attempted: usize,
    pub correct: usize,
    pub skipped_oov: usize,
}

impl CategoryCounts {
    fn add(&mut self, other: &CategoryCounts) {
        self.attempted += other.attempted;
        self.correct += other.correct;
        self.skipped_oov += other.skipped_oov;
    }

    pub fn accuracy(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.correct as f64 / self.attempted as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CategoryReport {
    pub name: String,
    #[serde(flatten)]
    pub counts: CategoryCounts,
    pub accuracy: f64,
}

/// Per-category and overall analogy accuracy. Accuracy is over attempted
/// questions; questions with an out-of-vocabulary word are only counted as
/// skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalogyReport {
    pub categories: Vec<CategoryReport>,
    #[serde(flatten)]
    pub total: CategoryCounts,
    pub accuracy: f64,
    /// True when no question could be attempted.
    pub skipped_all: bool,
}

impl AnalogyReport {
    fn from_counts(order: &[String], counts: &HashMap<String, CategoryCounts>) -> Self {
        let mut total = CategoryCounts::default();
        let categories: Vec<CategoryReport> = order
            .iter()
            .map(|name| {
                let c = counts[name].clone();
                total.add(&c);
                CategoryReport {
                    name: name.clone(),
                    accuracy: c.accuracy(),
                    counts: c,
                }
            })
            .collect();
        AnalogyReport {
            categories,
            accuracy: total.accuracy(),
            skipped_all: total.attempted == 0,
            total,
        }
    }

    pub fn category(&self, name: &str) -> Option<&CategoryReport> {
        self.categories.iter().find(|c| c.name == name)
    }

    /// Combine two reports over disjoint question sets. Categories keep the
    /// order of first appearance across `self` then `other`.
    pub fn merge(&self, other: &AnalogyReport) -> AnalogyReport {
        let mut order: Vec<String> = Vec::new();
        let mut counts: HashMap<String, CategoryCounts> = HashMap::new();
        for c in self.categories.iter().chain(&other.categories) {
            if !counts.contains_key(&c.name) {
                order.push(c.name.clone());
            }
            counts.entry(c.name.clone()).or_default().add(&c.counts);
        }
        AnalogyReport::from_counts(&order, &counts)
    }
}

#[derive(Clone, Copy)]
enum Outcome {
    Skipped,
    Wrong,
    Correct,
}

fn answer(view: &NormalizedView, q: &AnalogyQuestion, opts: SolveOptions) -> Outcome {
    let v = view.vocab();
    let (Some(a), Some(b), Some(c), Some(d)) = (
        v.resolve(&q.a),
        v.resolve(&q.b),
        v.resolve(&q.c),
        v.resolve(&q.expected),
    ) else {
        return Outcome::Skipped;
    };
    match solve_indices(view, [a, b, c], 1, opts).first() {
        Some(&(top, _)) if top == d || v.word(top).to_lowercase() == v.word(d).to_lowercase() => {
            Outcome::Correct
        }
        _ => Outcome::Wrong,
    }
}

pub fn evaluate(view: &NormalizedView, questions: &[AnalogyQuestion]) -> AnalogyReport {
    evaluate_with(view, questions, SolveOptions::default())
}

pub fn evaluate_with(
    view: &NormalizedView,
    questions: &[AnalogyQuestion],
    opts: SolveOptions,
) -> AnalogyReport {
    let outcomes: Vec<Outcome> = questions
        .par_iter()
        .map(|q| answer(view, q, opts))
        .collect();

    let mut order = Vec::new();
    let mut counts: HashMap<String, CategoryCounts> = HashMap::new();
    for (q, outcome) in questions.iter().zip(outcomes) {
        let entry = counts.entry(q.category.clone()).or_insert_with(|| {
            order.push(q.category.clone());
            CategoryCounts::default()
        });
        match outcome {
            Outcome::Skipped => entry.skipped_oov += 1,
            Outcome::Wrong => entry.attempted += 1,
            Outcome::Correct => {
                entry.attempted += 1;
                entry.correct += 1;
            }
        }
    }
    AnalogyReport::from_counts(&order, &counts)
}
