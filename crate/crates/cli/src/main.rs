//! `motvec`: one binary for the whole pipeline, from web archives to a
//! running embedding explorer.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "motvec",
    version,
    about = "Word-embedding pipeline: corpus, training, evaluation and serving"
)]
pub struct Cli {
    /// Emit machine-readable JSON: to stdout, or to PATH when given.
    #[arg(long, global = true, value_name = "PATH", num_args = 0..=1, default_missing_value = "-")]
    pub json: Option<PathBuf>,

    /// Random seed for commands that use one (train 42, viz 1, probe 7).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn WARC archives or plain text into tokenized lines of one language.
    Extract(ExtractArgs),
    /// Remove repeated lines across a directory of shards.
    Dedup(DedupArgs),
    /// Corpus construction (`corpus extract`, `corpus dedup`).
    Corpus {
        #[command(subcommand)]
        step: CorpusStep,
    },
    /// Train CBoW embeddings with negative sampling.
    Train(TrainArgs),
    /// Convert between text (`.vec`, `.txt`) and binary (`.bin`) formats.
    Convert(ConvertArgs),
    /// Score a model on an analogy question file.
    Analogy(AnalogyArgs),
    /// Cosine similarity between two words.
    Sim(SimArgs),
    /// Nearest neighbors of a word.
    Nn(NnArgs),
    /// 2-D t-SNE plot of a word's neighborhood, colored by k-means cluster.
    Viz(VizArgs),
    /// Sentiment probe: logistic regression over averaged embeddings.
    Probe(ProbeArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Subcommand)]
pub enum CorpusStep {
    Extract(ExtractArgs),
    Dedup(DedupArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Input files or directories (WARC, gzipped WARC, or plain text).
    #[arg(long = "in", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Target language tag.
    #[arg(long, default_value = "fr")]
    pub lang: String,
    /// Minimum language-detection confidence.
    #[arg(long, default_value_t = 0.5)]
    pub min_conf: f64,
    /// Drop extracted lines shorter than this many characters.
    #[arg(long, default_value_t = 30)]
    pub min_line_chars: usize,
    #[arg(long)]
    pub lowercase: bool,
    /// Worker threads (default: logical cores).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DedupArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Corpus file or directory, one whitespace-tokenized sequence per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output model; `.bin` selects the binary format, anything else text.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 300)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub window: usize,
    #[arg(long, default_value_t = 5)]
    pub min_count: u64,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    pub lr_start: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub lr_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub subsample: f64,
    /// Worker threads (default: logical cores). Only 1 is reproducible.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalogyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub questions: PathBuf,
    /// Only the N most frequent words are candidate answers.
    #[arg(long, value_name = "N")]
    pub candidate_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long)]
    pub model: PathBuf,
    pub w1: String,
    pub w2: String,
}

#[derive(Debug, Args)]
pub struct NnArgs {
    #[arg(long)]
    pub model: PathBuf,
    pub word: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct VizArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub word: String,
    /// Number of neighbors to plot.
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Number of clusters.
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 30.0)]
    pub perplexity: f64,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    /// Write the plot JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Training sentences, `label<TAB>sentence` per line.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    /// Also train on seed-matched random embeddings as a baseline.
    #[arg(long)]
    pub compare_random: bool,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// JSON config: `{"models": [{"name", "path"}], "default", "bind"}`.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the bind address (also settable via MOTVEC_BIND).
    #[arg(long)]
    pub bind: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
