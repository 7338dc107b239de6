//! Rank-order character n-gram language identification.
//!
//! A profile holds the 400 most frequent 1- to 4-grams of a sample text,
//! each word padded with `_`. A document is assigned to the profile with the
//! smallest out-of-place distance between rank lists. Only the document's
//! top 100 n-grams are compared: past that, a paragraph's n-grams are
//! singletons whose relative order is noise.

use std::collections::HashMap;

use crate::{Error, Result};

pub const PROFILE_SIZE: usize = 400;
pub const MAX_NGRAM: usize = 4;
pub const DOC_PROFILE_SIZE: usize = 100;
pub const MIN_TEXT_CHARS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LangProfile {
    pub language_tag: String,
    pub ngram_ranks: HashMap<String, usize>,
}

fn ngram_counts(text: &str) -> HashMap<String, u64> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let lower = text.to_lowercase();
    for word in lower
        .split(|c: char| !c.is_alphabetic() && c != '\'')
        .filter(|w| !w.is_empty())
    {
        let padded: Vec<char> = std::iter::once('_')
            .chain(word.chars())
            .chain(std::iter::once('_'))
            .collect();
        for n in 1..=MAX_NGRAM {
            for window in padded.windows(n) {
                if n == 1 && window[0] == '_' {
                    continue;
                }
                *counts.entry(window.iter().collect()).or_default() += 1;
            }
        }
    }
    counts
}

fn ranked(text: &str, size: usize) -> Vec<String> {
    let mut entries: Vec<(String, u64)> = ngram_counts(text).into_iter().collect();
    entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    entries.truncate(size);
    entries.into_iter().map(|(g, _)| g).collect()
}

/// Build a profile from sample text.
pub fn build_profile(language_tag: &str, sample: &str) -> LangProfile {
    LangProfile {
        language_tag: language_tag.to_owned(),
        ngram_ranks: ranked(sample, PROFILE_SIZE)
            .into_iter()
            .enumerate()
            .map(|(r, g)| (g, r))
            .collect(),
    }
}

const BUILTIN: &[(&str, &str)] = &[
    ("de", include_str!("../../data/lang/de.txt")),
    ("en", include_str!("../../data/lang/en.txt")),
    ("es", include_str!("../../data/lang/es.txt")),
    ("fr", include_str!("../../data/lang/fr.txt")),
];

/// Profiles for German, English, Spanish, and French built from bundled
/// sample paragraphs.
pub fn builtin_profiles() -> Vec<LangProfile> {
    BUILTIN
        .iter()
        .map(|(tag, text)| build_profile(tag, text))
        .collect()
}

/// Bundled sample text for `tag`, if any.
pub fn builtin_sample(tag: &str) -> Option<&'static str> {
    BUILTIN.iter().find(|(t, _)| *t == tag).map(|(_, s)| *s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub language_tag: String,
    pub confidence: f64,
    /// Out-of-place distance to every profile, in tag order.
    pub distances: Vec<(String, usize)>,
}

fn out_of_place(doc: &[String], profile: &LangProfile) -> usize {
    doc.iter()
        .enumerate()
        .map(|(rank, g)| match profile.ngram_ranks.get(g) {
            Some(&r) => rank.abs_diff(r),
            None => PROFILE_SIZE,
        })
        .sum()
}

/// Closest profile and `confidence = 1 - best / worst` distance. Ties go to
/// the lexicographically smallest tag, so profile order never matters.
pub fn detect_language(text: &str, profiles: &[LangProfile]) -> Result<Detection> {
    let chars = text.chars().filter(|c| !c.is_whitespace()).count();
    if chars < MIN_TEXT_CHARS {
        return Err(Error::TextTooShort(chars));
    }
    if profiles.len() < 2 {
        return Err(Error::NoProfiles(profiles.len()));
    }
    let doc = ranked(text, DOC_PROFILE_SIZE);
    let mut distances: Vec<(String, usize)> = profiles
        .iter()
        .map(|p| (p.language_tag.clone(), out_of_place(&doc, p)))
        .collect();
    distances.sort_by(|a, b| a.0.cmp(&b.0));
    let best = distances
        .iter()
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
        .unwrap();
    let worst = distances.iter().map(|d| d.1).max().unwrap();
    let confidence = if worst == 0 {
        0.0
    } else {
        1.0 - best.1 as f64 / worst as f64
    };
    Ok(Detection {
        language_tag: best.0.clone(),
        confidence,
        distances: distances.clone(),
    })
}
