use std::fs::{self, File};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cbow::{cbow_update, from_atomic, to_atomic, AtomicRows, Scratch};
use super::sampler::{keep_probability, NegativeSampler};
use super::{TrainingConfig, Vocabulary};
use crate::{EmbeddingSet, Error, Result};

/// Snapshot handed to the progress callback roughly once per second.
#[derive(Debug, Clone, PartialEq)]
pub struct Progress {
    pub tokens_processed: u64,
    pub tokens_total: u64,
    pub tokens_per_sec: f64,
    pub lr: f64,
    pub running_loss: f64,
}

pub type ProgressFn<'a> = dyn Fn(&Progress) + Sync + 'a;

/// Corpus files under `path`: the file itself, or every regular file below a
/// directory in sorted path order.
fn corpus_files(path: &Path) -> Result<Vec<PathBuf>> {
    let meta = fs::metadata(path).map_err(|e| Error::path(path, e))?;
    if meta.is_file() {
        return Ok(vec![path.to_owned()]);
    }
    let mut files = Vec::new();
    let mut stack = vec![path.to_owned()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).map_err(|e| Error::path(&dir, e))? {
            let entry = entry?;
            let p = entry.path();
            if entry.file_type()?.is_dir() {
                stack.push(p);
            } else {
                files.push(p);
            }
        }
    }
    files.sort();
    Ok(files)
}

/// Read a whitespace-tokenized corpus, one training sequence per line.
pub fn read_corpus(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut sentences = Vec::new();
    for file in corpus_files(path)? {
        let reader = BufReader::new(File::open(&file).map_err(|e| Error::path(&file, e))?);
        for line in reader.lines() {
            let line = line.map_err(|e| Error::path(&file, e))?;
            let tokens: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
            if !tokens.is_empty() {
                sentences.push(tokens);
            }
        }
    }
    Ok(sentences)
}

/// Train on the corpus at `path` (a file or a directory of shards).
pub fn train(path: &Path, config: &TrainingConfig) -> Result<EmbeddingSet> {
    let sentences = read_corpus(path)?;
    train_sentences(&sentences, config, None)
}

/// Build the vocabulary from `sentences` and train on them.
///
/// With `workers == 1` the result is a pure function of the sentences and
/// the config. With more workers the matrices are updated without locking
/// and results vary from run to run.
pub fn train_sentences<S: AsRef<str>>(
    sentences: &[Vec<S>],
    config: &TrainingConfig,
    progress: Option<&ProgressFn<'_>>,
) -> Result<EmbeddingSet> {
    config.validate()?;
    let vocab = Vocabulary::build(
        sentences.iter().map(|s| s.iter().map(AsRef::as_ref)),
        config.min_count,
    )?;
    let encoded: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| {
            s.iter()
                .filter_map(|t| vocab.get(t.as_ref()).map(|i| i as u32))
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect();

    let emb = EmbeddingSet::initialize(vocab, config.dim, config.seed)?;
    if config.epochs == 0 {
        return Ok(emb);
    }
    run_epochs(emb, &encoded, config, progress)
}

struct Shared<'a> {
    input: &'a [std::sync::atomic::AtomicU32],
    output: &'a [std::sync::atomic::AtomicU32],
    sampler: &'a NegativeSampler,
    keep: &'a [f64],
    processed: &'a AtomicU64,
    total: u64,
    config: &'a TrainingConfig,
}

impl Shared<'_> {
    fn lr(&self, processed: u64) -> f64 {
        let frac = (processed as f64 / self.total.max(1) as f64).min(1.0);
        let c = self.config;
        (c.lr_start - (c.lr_start - c.lr_end) * frac).max(c.lr_end)
    }
}

fn run_epochs(
    emb: EmbeddingSet,
    encoded: &[Vec<u32>],
    config: &TrainingConfig,
    progress: Option<&ProgressFn<'_>>,
) -> Result<EmbeddingSet> {
    let vocab = emb.vocab().clone();
    let dim = emb.dim();
    let sampler = NegativeSampler::new(vocab.counts())?;
    let total_count = vocab.total_tokens() as f64;
    let keep = vocab
        .counts()
        .iter()
        .map(|&c| keep_probability(c as f64 / total_count, config.subsample_t))
        .collect::<Result<Vec<_>>>()?;

    let input = to_atomic(emb.input_matrix());
    let output = to_atomic(emb.context_matrix().expect("initialized with context"));
    let corpus_tokens: u64 = encoded.iter().map(|s| s.len() as u64).sum();
    let processed = AtomicU64::new(0);
    let shared = Shared {
        input: &input,
        output: &output,
        sampler: &sampler,
        keep: &keep,
        processed: &processed,
        total: corpus_tokens * config.epochs as u64,
        config,
    };

    let workers = config.workers.min(encoded.len()).max(1);
    let chunk = encoded.len().div_ceil(workers);
    std::thread::scope(|scope| {
        for (w, shard) in encoded.chunks(chunk.max(1)).enumerate() {
            let shared = &shared;
            let report = if w == 0 { progress } else { None };
            scope.spawn(move || run_worker(w, shard, shared, dim, report));
        }
    });

    let vocab_out = vocab;
    EmbeddingSet::new(vocab_out, dim, from_atomic(input))?.with_context(from_atomic(output))
}

fn worker_seed(seed: u64, worker: usize) -> u64 {
    seed ^ (worker as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_worker(
    worker: usize,
    shard: &[Vec<u32>],
    shared: &Shared<'_>,
    dim: usize,
    progress: Option<&ProgressFn<'_>>,
) {
    let config = shared.config;
    let mut rng = ChaCha8Rng::seed_from_u64(worker_seed(config.seed, worker));
    let mut input = AtomicRows::new(shared.input, dim);
    let mut output = AtomicRows::new(shared.output, dim);
    let mut scratch = Scratch::<f32>::new(dim);
    let mut kept: Vec<usize> = Vec::new();
    let mut context: Vec<usize> = Vec::with_capacity(2 * config.window);
    let mut negatives: Vec<usize> = Vec::with_capacity(config.negatives);

    let started = Instant::now();
    let mut last_report = started;
    let (mut loss_sum, mut loss_n) = (0.0f64, 0u64);

    for _ in 0..config.epochs {
        for sentence in shard {
            let done = shared.processed.load(Ordering::Relaxed);
            let lr = shared.lr(done) as f32;

            kept.clear();
            kept.extend(
                sentence
                    .iter()
                    .map(|&w| w as usize)
                    .filter(|&w| shared.keep[w] >= 1.0 || rng.random::<f64>() < shared.keep[w]),
            );

            for pos in 0..kept.len() {
                let reduce = rng.random_range(0..config.window);
                let span = config.window - reduce;
                let lo = pos.saturating_sub(span);
                let hi = (pos + span + 1).min(kept.len());
                context.clear();
                context.extend((lo..hi).filter(|&p| p != pos).map(|p| kept[p]));
                if context.is_empty() {
                    continue;
                }
                let target = kept[pos];
                negatives.clear();
                for _ in 0..config.negatives {
                    let n = shared.sampler.sample(&mut rng);
                    if n != target {
                        negatives.push(n);
                    }
                }
                let loss = cbow_update(
                    &mut input,
                    &mut output,
                    &context,
                    target,
                    &negatives,
                    lr,
                    &mut scratch,
                );
                loss_sum += loss as f64;
                loss_n += 1;
            }
            shared
                .processed
                .fetch_add(sentence.len() as u64, Ordering::Relaxed);

            if let Some(report) = progress {
                let now = Instant::now();
                if now.duration_since(last_report) >= Duration::from_secs(1) {
                    last_report = now;
                    let done = shared.processed.load(Ordering::Relaxed);
                    report(&Progress {
                        tokens_processed: done,
                        tokens_total: shared.total,
                        tokens_per_sec: done as f64 / now.duration_since(started).as_secs_f64(),
                        lr: lr as f64,
                        running_loss: loss_sum / loss_n.max(1) as f64,
                    });
                    loss_sum = 0.0;
                    loss_n = 0;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_corpus() -> Vec<Vec<String>> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let words = ["le", "chat", "chien", "mange", "dort", "vite", "ici"];
        (0..300)
            .map(|_| {
                (0..8)
                    .map(|_| words[rng.random_range(0..words.len())].to_owned())
                    .collect()
            })
            .collect()
    }

    fn small_config() -> TrainingConfig {
        TrainingConfig {
            dim: 8,
            window: 3,
            min_count: 1,
            epochs: 2,
            seed: 9,
            ..Default::default()
        }
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let config = TrainingConfig {
            epochs: 0,
            ..small_config()
        };
        let a = train_sentences(&toy_corpus(), &config, None).unwrap();
        let init = EmbeddingSet::initialize(a.vocab().clone(), 8, 9).unwrap();
        assert_eq!(a, init);
    }

    #[test]
    fn single_worker_is_deterministic() {
        let a = train_sentences(&toy_corpus(), &small_config(), None).unwrap();
        let b = train_sentences(&toy_corpus(), &small_config(), None).unwrap();
        assert_eq!(a.input_matrix(), b.input_matrix());
        assert_eq!(a.context_matrix(), b.context_matrix());
        let init = EmbeddingSet::initialize(a.vocab().clone(), 8, 9).unwrap();
        assert_ne!(a.input_matrix(), init.input_matrix());
    }

    #[test]
    fn multi_worker_produces_finite_vectors() {
        let config = TrainingConfig {
            workers: 4,
            ..small_config()
        };
        let emb = train_sentences(&toy_corpus(), &config, None).unwrap();
        assert!(emb.input_matrix().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn empty_vocabulary_propagates() {
        let config = TrainingConfig {
            min_count: 10_000,
            ..small_config()
        };
        assert!(matches!(
            train_sentences(&toy_corpus(), &config, None),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn missing_corpus_is_io_error() {
        let err = train(Path::new("/nonexistent/corpus"), &small_config()).unwrap_err();
        assert!(matches!(err, Error::Path { .. }));
    }
}
