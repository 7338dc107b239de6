//! Exact t-SNE: per-point bandwidths by binary search on entropy, then
//! gradient descent with momentum, per-parameter gains, and early
//! exaggeration.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::{Error, Result};

/// Tolerance on `|H_i - ln(perplexity)|` for the bandwidth search.
pub const ENTROPY_TOLERANCE: f64 = 1e-5;
const MAX_SEARCH_STEPS: usize = 200;
const MIN_GAIN: f64 = 0.01;
const P_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub initial_momentum: f64,
    pub final_momentum: f64,
    pub momentum_switch_iter: usize,
    pub init_std: f64,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iters: 250,
            initial_momentum: 0.5,
            final_momentum: 0.8,
            momentum_switch_iter: 250,
            init_std: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsneResult {
    pub coords: Vec<[f64; 2]>,
    /// Symmetrized joint probabilities, `n x n` row-major.
    pub p: Vec<f64>,
    /// Entropy (nats) of each conditional distribution.
    pub entropies: Vec<f64>,
    pub kl_initial: f64,
    pub kl_final: f64,
}

/// Largest perplexity accepted for `n` points.
pub fn max_perplexity(n: usize) -> f64 {
    (n as f64 - 1.0) / 3.0
}

pub fn squared_distances(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

/// Conditional distribution of one row at precision `beta`, written into
/// `out`. Distances are shifted by their minimum so large `beta` never
/// underflows. Returns the entropy in nats.
fn row_distribution(dist: &[f64], skip: usize, beta: f64, out: &mut [f64]) -> f64 {
    let min = dist
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != skip)
        .map(|(_, &d)| d)
        .fold(f64::INFINITY, f64::min);
    let mut z = 0.0;
    let mut weighted = 0.0;
    for (j, (&d, o)) in dist.iter().zip(out.iter_mut()).enumerate() {
        if j == skip {
            *o = 0.0;
            continue;
        }
        let shifted = d - min;
        let w = (-beta * shifted).exp();
        *o = w;
        z += w;
        weighted += shifted * w;
    }
    for o in out.iter_mut() {
        *o /= z;
    }
    z.ln() + beta * weighted / z
}

/// Row-stochastic conditional affinities `p_{j|i}` whose entropies match
/// `ln(perplexity)`, from an `n x n` squared-distance matrix. Returns the
/// matrix and each row's achieved entropy.
pub fn conditional_affinities(dist2: &[f64], n: usize, perplexity: f64) -> (Vec<f64>, Vec<f64>) {
    let target = perplexity.ln();
    let mut p = vec![0.0; n * n];
    let entropies: Vec<f64> = p
        .par_chunks_mut(n)
        .enumerate()
        .map(|(i, row)| {
            let dist = &dist2[i * n..(i + 1) * n];
            let mut beta = 1.0;
            let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
            let mut h = row_distribution(dist, i, beta, row);
            for _ in 0..MAX_SEARCH_STEPS {
                let diff = h - target;
                if diff.abs() <= ENTROPY_TOLERANCE {
                    break;
                }
                if diff > 0.0 {
                    lo = beta;
                    beta = if hi.is_infinite() {
                        beta * 2.0
                    } else {
                        (beta + hi) / 2.0
                    };
                } else {
                    hi = beta;
                    beta = (beta + lo) / 2.0;
                }
                h = row_distribution(dist, i, beta, row);
            }
            h
        })
        .collect();
    (p, entropies)
}

/// `P_ij = (p_{j|i} + p_{i|j}) / 2n`.
pub fn joint_probabilities(conditional: &[f64], n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n * n];
    let denom = 2.0 * n as f64;
    for i in 0..n {
        for j in 0..n {
            p[i * n + j] = (conditional[i * n + j] + conditional[j * n + i]) / denom;
        }
    }
    p
}

fn student_kernel(y: &[[f64; 2]]) -> (Vec<f64>, f64) {
    let n = y.len();
    let mut num = vec![0.0; n * n];
    num.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            if i != j {
                let dx = y[i][0] - y[j][0];
                let dy = y[i][1] - y[j][1];
                *v = 1.0 / (1.0 + dx * dx + dy * dy);
            }
        }
    });
    let z = num.chunks(n).map(|r| r.iter().sum::<f64>()).sum();
    (num, z)
}

/// `KL(P || Q)` for embedding `y`.
pub fn kl_divergence(p: &[f64], y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let (num, z) = student_kernel(y);
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let pij = p[i * n + j].max(P_FLOOR);
                let qij = (num[i * n + j] / z).max(P_FLOOR);
                kl += pij * (pij / qij).ln();
            }
        }
    }
    kl
}

pub fn tsne(points: &[Vec<f64>], config: &TsneConfig) -> Result<TsneResult> {
    let n = points.len();
    if n < 3 {
        return Err(Error::TooFewPoints {
            points: n,
            clusters: 3,
        });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Shape("points have differing dimensions".into()));
    }
    let max = max_perplexity(n);
    // written to reject NaN as well
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    let bad = !(config.perplexity > 0.0) || config.perplexity > max;
    if bad {
        return Err(Error::PerplexityTooLarge {
            perplexity: config.perplexity,
            points: n,
            max,
        });
    }

    let dist2 = squared_distances(points);
    let (conditional, entropies) = conditional_affinities(&dist2, n, config.perplexity);
    let p = joint_probabilities(&conditional, n);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, config.init_std)
        .map_err(|e| Error::InvalidConfig(format!("t-SNE init: {e}")))?;
    let mut y: Vec<[f64; 2]> = (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    let kl_initial = kl_divergence(&p, &y);

    let mut update = vec![[0.0f64; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut grad = vec![[0.0f64; 2]; n];
    for iter in 0..config.iterations {
        let exaggeration = if iter < config.exaggeration_iters {
            config.early_exaggeration
        } else {
            1.0
        };
        let momentum = if iter < config.momentum_switch_iter {
            config.initial_momentum
        } else {
            config.final_momentum
        };

        let (num, z) = student_kernel(&y);
        grad.par_iter_mut().enumerate().for_each(|(i, g)| {
            let mut acc = [0.0; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let q = num[i * n + j];
                let m = (exaggeration * p[i * n + j] - q / z) * q;
                acc[0] += m * (y[i][0] - y[j][0]);
                acc[1] += m * (y[i][1] - y[j][1]);
            }
            *g = [4.0 * acc[0], 4.0 * acc[1]];
        });

        for i in 0..n {
            for d in 0..2 {
                let same_sign = (grad[i][d] > 0.0) == (update[i][d] > 0.0);
                gains[i][d] = if same_sign {
                    (gains[i][d] * 0.8).max(MIN_GAIN)
                } else {
                    gains[i][d] + 0.2
                };
                update[i][d] =
                    momentum * update[i][d] - config.learning_rate * gains[i][d] * grad[i][d];
                y[i][d] += update[i][d];
            }
        }
        let mean = y.iter().fold([0.0; 2], |m, v| [m[0] + v[0], m[1] + v[1]]);
        let mean = [mean[0] / n as f64, mean[1] / n as f64];
        for v in &mut y {
            v[0] -= mean[0];
            v[1] -= mean[1];
        }
    }

    let kl_final = kl_divergence(&p, &y);
    Ok(TsneResult {
        coords: y,
        p,
        entropies,
        kl_initial,
        kl_final,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equidistant_point_matches_full_perplexity() {
        // a regular simplex: every pair at squared distance 2
        let n = 6;
        let points: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let d = squared_distances(&points);
        let (p, h) = conditional_affinities(&d, n, (n - 1) as f64);
        for (i, &hi) in h.iter().enumerate() {
            assert!((hi - ((n - 1) as f64).ln()).abs() < 1e-12);
            for j in 0..n {
                let expected = if i == j { 0.0 } else { 1.0 / (n - 1) as f64 };
                assert!((p[i * n + j] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perplexity_bound_enforced() {
        let points: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64]).collect();
        let config = TsneConfig {
            perplexity: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            tsne(&points, &config),
            Err(Error::PerplexityTooLarge { .. })
        ));
        let config = TsneConfig {
            perplexity: 1.0,
            iterations: 50,
            ..Default::default()
        };
        let r = tsne(&points, &config).unwrap();
        assert_eq!(r.coords.len(), 4);
        assert!(r
            .coords
            .iter()
            .all(|c| c[0].is_finite() && c[1].is_finite()));
    }

    #[test]
    fn deterministic_from_seed() {
        let points: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![(i as f64).sin(), (i as f64 * 0.3).cos(), i as f64 * 0.1])
            .collect();
        let config = TsneConfig {
            perplexity: 3.0,
            iterations: 200,
            seed: 5,
            ..Default::default()
        };
        assert_eq!(
            tsne(&points, &config).unwrap(),
            tsne(&points, &config).unwrap()
        );
    }
}
