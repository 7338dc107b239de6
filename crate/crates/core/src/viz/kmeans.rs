use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 100;
pub const RELATIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after each Lloyd iteration.
    pub history: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = sq_dist(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn plus_plus_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points[first].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();

    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if u < w {
                        break;
                    }
                    u -= w;
                }
            }
            pick.unwrap()
        } else {
            // every remaining point coincides with a centroid
            chosen.iter().position(|&c| !c).unwrap()
        };
        chosen[pick] = true;
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[pick]));
        }
        centroids.push(points[pick].clone());
    }
    centroids
}

/// k-means++ seeding followed by Lloyd iterations, stopping when inertia
/// changes by less than `1e-6` relative or after 100 iterations. A cluster
/// that empties is reseeded to the point farthest from its centroid.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansResult> {
    let n = points.len();
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    if n < k {
        return Err(Error::TooFewPoints {
            points: n,
            clusters: k,
        });
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Shape("points have differing dimensions".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut assignments = vec![0usize; n];
    let mut history = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        let mut dist = vec![0.0; n];
        for (i, p) in points.iter().enumerate() {
            let (j, d) = nearest(p, &centroids);
            assignments[i] = j;
            dist[i] = d;
        }

        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            sizes[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for j in 0..k {
            if sizes[j] > 0 {
                let inv = 1.0 / sizes[j] as f64;
                centroids[j] = sums[j].iter().map(|s| s * inv).collect();
            }
        }
        for i in 0..n {
            dist[i] = sq_dist(&points[i], &centroids[assignments[i]]);
        }
        for j in 0..k {
            if sizes[j] == 0 {
                let far = (0..n)
                    .filter(|&i| sizes[assignments[i]] > 1)
                    .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)));
                if let Some(far) = far {
                    sizes[assignments[far]] -= 1;
                    sizes[j] = 1;
                    assignments[far] = j;
                    centroids[j] = points[far].clone();
                    dist[far] = 0.0;
                }
            }
        }

        let inertia: f64 = dist.iter().sum();
        let converged = history.last().is_some_and(|&prev: &f64| {
            prev == inertia || (prev - inertia).abs() < RELATIVE_TOLERANCE * prev.abs()
        });
        history.push(inertia);
        if converged {
            break;
        }
    }

    Ok(KMeansResult {
        assignments,
        centroids,
        inertia: *history.last().unwrap(),
        history,
    })
}
