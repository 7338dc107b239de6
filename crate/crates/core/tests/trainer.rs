mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use motvec_core::trainer::{cbow_step, cbow_update, train, train_sentences, DenseRows, Scratch};
use motvec_core::{EmbeddingSet, Error, TrainingConfig, Vocabulary};

use common::*;

proptest! {
    #[test]
    fn vocabulary_matches_counting_oracle(
        corpus in prop::collection::vec(prop::collection::vec("[a-e]{1,2}", 0..12), 1..12),
        min_count in 1u64..4,
    ) {
        let mut oracle: HashMap<&str, u64> = HashMap::new();
        for t in corpus.iter().flatten() {
            *oracle.entry(t).or_default() += 1;
        }
        let mut expected: Vec<(&str, u64)> = oracle.into_iter().filter(|(_, c)| *c >= min_count).collect();
        expected.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));

        match Vocabulary::build(&corpus, min_count) {
            Ok(vocab) => {
                let got: Vec<(&str, u64)> = vocab.words().iter().map(String::as_str).zip(vocab.counts().iter().copied()).collect();
                prop_assert_eq!(&got, &expected);
                for (i, w) in vocab.words().iter().enumerate() {
                    prop_assert_eq!(vocab.get(w), Some(i));
                }
                prop_assert_eq!(vocab.total_tokens(), expected.iter().map(|e| e.1).sum::<u64>());
            }
            Err(Error::EmptyVocabulary) => prop_assert!(expected.is_empty()),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

#[test]
fn loss_decreases_on_a_fixed_micro_batch() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (v, dim) = (12, 6);
    let mut input: Vec<f64> = (0..v * dim).map(|_| rng.random_range(-0.5..0.5)).collect();
    let mut output: Vec<f64> = (0..v * dim).map(|_| rng.random_range(-0.5..0.5)).collect();
    let batch: Vec<(Vec<usize>, usize, Vec<usize>)> = (0..8)
        .map(|i| {
            (
                vec![i, (i + 1) % v, (i + 2) % v],
                (i + 3) % v,
                vec![(i + 5) % v, (i + 7) % v],
            )
        })
        .collect();
    let mut scratch = Scratch::new(dim);
    let mut totals = Vec::new();
    for _ in 0..100 {
        let mut total = 0.0;
        for (ctx, target, negs) in &batch {
            total += cbow_update(
                &mut DenseRows::new(&mut input, dim),
                &mut DenseRows::new(&mut output, dim),
                ctx,
                *target,
                negs,
                0.05,
                &mut scratch,
            );
        }
        totals.push(total);
    }
    let early: f64 = totals[..10].iter().sum::<f64>() / 10.0;
    let late: f64 = totals[90..].iter().sum::<f64>() / 10.0;
    assert!(late < early, "{early} -> {late}");
    assert!(
        totals[10..].windows(2).all(|w| w[1] <= w[0] + 1e-12),
        "{totals:?}"
    );
}

#[test]
fn zero_vectors_give_closed_form_loss() {
    let vocab = Vocabulary::from_words((0..6).map(|i| format!("w{i}")).collect()).unwrap();
    let mut emb = EmbeddingSet::new(vocab, 4, vec![0.0; 24])
        .unwrap()
        .with_context(vec![0.0; 24])
        .unwrap();
    let loss = cbow_step(&mut emb, &[0], 1, &[2, 3, 4], 0.1).unwrap();
    assert!((loss as f64 - 4.0 * 2f64.ln()).abs() < 1e-6);
    assert!(cbow_step(&mut emb, &[0], 1, &[1], 0.1).is_err());
}

fn small_config(seed: u64) -> TrainingConfig {
    TrainingConfig {
        dim: 50,
        window: 5,
        min_count: 5,
        epochs: 5,
        seed,
        workers: 1,
        ..TrainingConfig::default()
    }
}

#[test]
fn chat_and_chien_share_a_slot() {
    let corpus = synonym_corpus(300_000, 11);
    let emb = train_sentences(&corpus, &small_config(42), None).unwrap();
    let chat = emb.lookup("chat").unwrap();
    let chien = emb.lookup("chien").unwrap();
    let pair = dense_cosine(chat, chien);
    let others: Vec<f64> = emb
        .iter()
        .filter(|(w, _)| *w != "chat" && *w != "chien")
        .map(|(_, v)| dense_cosine(chat, v))
        .collect();
    let beaten = others.iter().filter(|&&c| pair > c).count();
    assert!(beaten * 10 >= others.len() * 9, "{beaten}/{}", others.len());
}

#[test]
fn training_from_a_corpus_directory_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synonym_corpus(80_000, 5);
    let (a, b) = corpus.split_at(corpus.len() / 2);
    for (name, part) in [("part-1.txt", a), ("part-2.txt", b)] {
        let text: String = part.iter().map(|s| s.join(" ") + "\n").collect();
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    let config = TrainingConfig {
        dim: 16,
        epochs: 2,
        ..small_config(9)
    };
    let first = train(dir.path(), &config).unwrap();
    let second = train(dir.path(), &config).unwrap();
    assert_eq!(first.vocab().words(), second.vocab().words());
    assert!(first
        .input_matrix()
        .iter()
        .zip(second.input_matrix())
        .all(|(x, y)| x.to_bits() == y.to_bits()));
    let third = train(dir.path(), &TrainingConfig { seed: 10, ..config }).unwrap();
    assert_ne!(first.input_matrix(), third.input_matrix());
}

#[test]
fn multi_worker_training_still_learns() {
    let corpus = synonym_corpus(300_000, 13);
    let config = TrainingConfig {
        workers: 4,
        ..small_config(42)
    };
    let emb = train_sentences(&corpus, &config, None).unwrap();
    assert!(emb.input_matrix().iter().all(|x| x.is_finite()));
    let mut passed = 0;
    for (a, b) in SYNONYM_PAIRS {
        let va = emb.lookup(a).unwrap();
        let pair = dense_cosine(va, emb.lookup(b).unwrap());
        let base = median(emb.iter().map(|(_, v)| dense_cosine(va, v)).collect());
        passed += usize::from(pair > base);
    }
    assert!(passed >= 18, "{passed}/20");
}
