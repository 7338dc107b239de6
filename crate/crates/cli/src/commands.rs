use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::thread;

use serde::Serialize;
use serde_json::json;

use motvec_core::analogy::{evaluate_with, parse_questions, SolveOptions};
use motvec_core::corpus::{
    builtin_profiles, run_dedup, run_extract, ExtractConfig, Extractor, PipelineStats,
};
use motvec_core::probe::{evaluate_probe, load_tsv, train_probe, ProbeConfig};
use motvec_core::query::{cosine, neighbors};
use motvec_core::trainer::{read_corpus, train_sentences, Progress};
use motvec_core::viz::{build_plot, VizRequest};
use motvec_core::{store, EmbeddingSet, NormalizedView, TrainingConfig};
use motvec_service::{serve, ServerConfig, ServiceError};

use crate::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] motvec_core::Error),
    #[error(transparent)]
    Service(#[from] ServiceError),
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

type Result<T> = std::result::Result<T, CliError>;

fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Print `value` as JSON when `--json` was given (stdout for a bare flag,
/// a file otherwise), and run `human` unless JSON went to stdout.
fn report<T: Serialize>(
    json_target: &Option<PathBuf>,
    value: &T,
    human: impl FnOnce(),
) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize") + "\n";
    match json_target {
        Some(p) if p.as_os_str() == "-" => {
            io::stdout().write_all(text.as_bytes())?;
        }
        Some(p) => {
            fs::write(p, text).map_err(|source| CliError::Write {
                path: p.clone(),
                source,
            })?;
            human();
        }
        None => human(),
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<EmbeddingSet> {
    Ok(store::load(path)?)
}

pub fn run(cli: Cli) -> Result<()> {
    let json = cli.json;
    let seed = cli.seed;
    match cli.command {
        Command::Extract(args)
        | Command::Corpus {
            step: CorpusStep::Extract(args),
        } => extract(args, &json),
        Command::Dedup(args)
        | Command::Corpus {
            step: CorpusStep::Dedup(args),
        } => dedup(args, &json),
        Command::Train(args) => train(args, seed.unwrap_or(42), &json),
        Command::Convert(args) => convert(args, &json),
        Command::Analogy(args) => analogy(args, &json),
        Command::Sim(args) => sim(args, &json),
        Command::Nn(args) => nn(args, &json),
        Command::Viz(args) => viz(args, seed.unwrap_or(1), &json),
        Command::Probe(args) => probe(args, seed.unwrap_or(7), &json),
        Command::Serve(args) => serve_api(args),
    }
}

fn print_stats(stats: &PipelineStats) {
    println!(
        "records: {} seen, {} kept; bytes: {} in, {} out; duplicate lines removed: {}",
        stats.records_seen,
        stats.records_kept,
        stats.bytes_in,
        stats.bytes_out,
        stats.lines_deduped
    );
}

fn extract(args: ExtractArgs, json: &Option<PathBuf>) -> Result<()> {
    let config = ExtractConfig {
        lang: args.lang,
        min_confidence: args.min_conf,
        min_line_chars: args.min_line_chars,
        lowercase: args.lowercase,
    };
    let extractor = Extractor::new(builtin_profiles(), config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.workers.unwrap_or_else(default_workers))
        .build()?;
    let stats = pool.install(|| run_extract(&extractor, &args.inputs, &args.out))?;
    report(json, &stats, || print_stats(&stats))
}

fn dedup(args: DedupArgs, json: &Option<PathBuf>) -> Result<()> {
    let stats = run_dedup(&args.input, &args.out)?;
    report(json, &stats, || print_stats(&stats))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TrainSummary {
    vocab_size: usize,
    dim: usize,
    tokens: u64,
    out: PathBuf,
}

fn train(args: TrainArgs, seed: u64, json: &Option<PathBuf>) -> Result<()> {
    let config = TrainingConfig {
        dim: args.dim,
        window: args.window,
        min_count: args.min_count,
        negatives: args.negatives,
        epochs: args.epochs,
        lr_start: args.lr_start,
        lr_end: args.lr_end,
        subsample_t: args.subsample,
        seed,
        workers: args.workers.unwrap_or_else(default_workers),
    };
    config.validate()?;
    let sentences = read_corpus(&args.corpus)?;
    let progress = |p: &Progress| {
        eprintln!(
            "{:5.1}%  {:>10.0} tokens/s  lr {:.6}  loss {:.4}",
            100.0 * p.tokens_processed as f64 / p.tokens_total.max(1) as f64,
            p.tokens_per_sec,
            p.lr,
            p.running_loss
        );
    };
    let emb = train_sentences(&sentences, &config, Some(&progress))?.into_published();
    store::save(&emb, &args.out)?;
    let summary = TrainSummary {
        vocab_size: emb.len(),
        dim: emb.dim(),
        tokens: emb.vocab().total_tokens(),
        out: args.out.clone(),
    };
    report(json, &summary, || {
        println!(
            "trained {} words x {} dims on {} tokens -> {}",
            summary.vocab_size,
            summary.dim,
            summary.tokens,
            args.out.display()
        )
    })
}

fn convert(args: ConvertArgs, json: &Option<PathBuf>) -> Result<()> {
    let emb = load_model(&args.input)?;
    store::save(&emb, &args.out)?;
    let summary = json!({"vocabSize": emb.len(), "dim": emb.dim(), "out": args.out});
    report(json, &summary, || {
        println!(
            "wrote {} words x {} dims to {}",
            emb.len(),
            emb.dim(),
            args.out.display()
        )
    })
}

fn analogy(args: AnalogyArgs, json: &Option<PathBuf>) -> Result<()> {
    let view = NormalizedView::new(&load_model(&args.model)?);
    let questions = parse_questions(&args.questions)?;
    let report_value = evaluate_with(
        &view,
        &questions,
        SolveOptions {
            candidate_cap: args.candidate_cap,
        },
    );
    report(json, &report_value, || {
        for c in &report_value.categories {
            println!(
                "{:<30} {:>6}/{:<6} {:>7.2}%  skipped {}",
                c.name,
                c.counts.correct,
                c.counts.attempted,
                100.0 * c.accuracy,
                c.counts.skipped_oov
            );
        }
        println!(
            "{:<30} {:>6}/{:<6} {:>7.2}%  skipped {}",
            "total",
            report_value.total.correct,
            report_value.total.attempted,
            100.0 * report_value.accuracy,
            report_value.total.skipped_oov
        );
    })
}

fn sim(args: SimArgs, json: &Option<PathBuf>) -> Result<()> {
    let view = NormalizedView::new(&load_model(&args.model)?);
    let c = cosine(&view, &args.w1, &args.w2)?;
    report(
        json,
        &json!({"w1": args.w1, "w2": args.w2, "cosine": c}),
        || println!("{c:.6}"),
    )
}

fn nn(args: NnArgs, json: &Option<PathBuf>) -> Result<()> {
    let view = NormalizedView::new(&load_model(&args.model)?);
    let results = neighbors(&view, &args.word, args.k)?;
    report(
        json,
        &json!({"word": args.word, "results": results}),
        || {
            for r in &results {
                println!("{}\t{:.6}", r.word, r.score);
            }
        },
    )
}

fn viz(args: VizArgs, seed: u64, json: &Option<PathBuf>) -> Result<()> {
    let view = NormalizedView::new(&load_model(&args.model)?);
    let mut req = VizRequest::new(args.word, args.n, args.k, seed);
    req.perplexity = args.perplexity;
    req.iterations = args.iterations;
    let plot = build_plot(&view, &req)?;
    let target = match (&args.out, json) {
        (Some(out), _) => Some(out.clone()),
        (None, Some(j)) => Some(j.clone()),
        (None, None) => Some(PathBuf::from("-")),
    };
    report(&target, &plot, || {
        eprintln!(
            "{} points, {} clusters, KL {:.4} -> {:.4}, inertia {:.4}",
            plot.points.len(),
            req.k,
            plot.kl_initial,
            plot.kl_final,
            plot.inertia
        )
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ProbeReport {
    accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline_random_accuracy: Option<f64>,
}

fn probe(args: ProbeArgs, seed: u64, json: &Option<PathBuf>) -> Result<()> {
    let emb = load_model(&args.model)?;
    let train = load_tsv(&args.train)?;
    let test = load_tsv(&args.test)?;
    let config = ProbeConfig {
        epochs: args.epochs,
        lr: args.lr,
        seed,
    };
    let accuracy = |emb: &EmbeddingSet| -> Result<f64> {
        let model = train_probe(&train, emb, &config)?;
        Ok(evaluate_probe(&model, &test, emb))
    };
    let out = ProbeReport {
        accuracy: accuracy(&emb)?,
        baseline_random_accuracy: if args.compare_random {
            let random = EmbeddingSet::initialize(emb.vocab().clone(), emb.dim(), seed)?;
            Some(accuracy(&random)?)
        } else {
            None
        },
    };
    report(json, &out, || {
        println!("accuracy {:.4}", out.accuracy);
        if let Some(b) = out.baseline_random_accuracy {
            println!("random-embedding baseline {b:.4}");
        }
    })
}

fn serve_api(args: ServeArgs) -> Result<()> {
    let mut config = ServerConfig::load(&args.config)?.with_env_overrides();
    if let Some(bind) = args.bind {
        config.bind = bind;
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(serve(config))?;
    Ok(())
}
