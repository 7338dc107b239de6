//! Neighborhood scatter plots: the `n` nearest words to a query, projected
//! to 2-D with t-SNE and colored by k-means clusters computed in the
//! original embedding space.

pub mod kmeans;
pub mod tsne;

pub use kmeans::{kmeans, KMeansResult};
pub use tsne::{tsne, TsneConfig, TsneResult};

use serde::{Deserialize, Serialize};

use crate::query::neighbors_index;
use crate::{Error, NormalizedView, Result};

pub const DEFAULT_PERPLEXITY: f64 = 30.0;
pub const DEFAULT_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VizRequest {
    pub word: String,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    /// Clamped to `n / 3` (the t-SNE bound for `n + 1` points).
    pub perplexity: f64,
    pub iterations: usize,
}

impl VizRequest {
    pub fn new(word: impl Into<String>, n: usize, k: usize, seed: u64) -> Self {
        VizRequest {
            word: word.into(),
            n,
            k,
            seed,
            perplexity: DEFAULT_PERPLEXITY,
            iterations: DEFAULT_ITERATIONS,
        }
    }

    fn validate(&self, vocab_len: usize) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidArgument("k must be >= 2".into()));
        }
        if self.k >= self.n {
            return Err(Error::TooFewPoints {
                points: self.n,
                clusters: self.k,
            });
        }
        if self.n >= vocab_len {
            return Err(Error::InvalidArgument(format!(
                "n = {} must be smaller than the vocabulary ({vocab_len} words)",
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub word: String,
    pub x: f64,
    pub y: f64,
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterPlot {
    pub word: String,
    /// The query word first, then its neighbors by decreasing similarity.
    pub points: Vec<PlotPoint>,
    pub kl_initial: f64,
    pub kl_final: f64,
    pub inertia: f64,
}

pub fn build_plot(view: &NormalizedView, req: &VizRequest) -> Result<ClusterPlot> {
    let center = view.resolve(&req.word)?;
    req.validate(view.len())?;

    let mut indices = vec![center];
    indices.extend(
        neighbors_index(view, center, req.n)
            .into_iter()
            .map(|(i, _)| i),
    );
    if indices.len() <= req.k {
        return Err(Error::TooFewPoints {
            points: indices.len(),
            clusters: req.k,
        });
    }

    // original vectors, recovered from the unit rows and their norms
    let vectors: Vec<Vec<f64>> = indices
        .iter()
        .map(|&i| {
            let norm = view.norm(i) as f64;
            view.unit(i).iter().map(|&v| v as f64 * norm).collect()
        })
        .collect();

    let clusters = kmeans(&vectors, req.k, req.seed)?;
    let config = TsneConfig {
        perplexity: req.perplexity.min(tsne::max_perplexity(vectors.len())),
        iterations: req.iterations,
        seed: req.seed,
        ..Default::default()
    };
    let embedded = tsne(&vectors, &config)?;

    let points = indices
        .iter()
        .zip(&embedded.coords)
        .zip(&clusters.assignments)
        .map(|((&i, c), &cluster)| PlotPoint {
            word: view.vocab().word(i).to_owned(),
            x: c[0],
            y: c[1],
            cluster,
        })
        .collect();
    Ok(ClusterPlot {
        word: view.vocab().word(center).to_owned(),
        points,
        kl_initial: embedded.kl_initial,
        kl_final: embedded.kl_final,
        inertia: clusters.inertia,
    })
}
