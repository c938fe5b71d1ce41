//! Mini-batch k-means with a partial-fit contract.
//!
//! The first batch seeds centroids with k-means++ and runs Lloyd iterations
//! on that batch; every later batch applies one pass of the standard
//! mini-batch update (per-centroid learning rate `1/count`). Empty clusters
//! encountered during the Lloyd iterations are re-seeded from the farthest
//! point in the current batch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Seeding parameters consumed by the first `partial_fit` call only.
#[derive(Clone, Copy, Debug)]
pub struct KMeansInit {
    pub seed: u64,
    /// Lloyd iterations run on the first batch.
    pub iterations: usize,
}

impl Default for KMeansInit {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansModel {
    clusters: usize,
    dim: usize,
    centroids: Matrix,
    counts: Vec<u64>,
}

impl KMeansModel {
    pub fn new(clusters: usize) -> Self {
        assert!(clusters >= 1, "k-means needs at least one cluster");
        Self {
            clusters,
            dim: 0,
            centroids: Matrix::zeros(0, 0),
            counts: Vec::new(),
        }
    }

    /// Reconstructs a fitted model from stored state.
    pub fn from_parts(centroids: Matrix, counts: Vec<u64>) -> Result<Self> {
        if centroids.rows() != counts.len() {
            return Err(Error::DimensionMismatch {
                expected: centroids.rows(),
                got: counts.len(),
            });
        }
        Ok(Self {
            clusters: centroids.rows(),
            dim: centroids.cols(),
            centroids,
            counts,
        })
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centroids(&self) -> &Matrix {
        &self.centroids
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn is_fitted(&self) -> bool {
        self.dim > 0
    }

    pub fn partial_fit(&mut self, batch: &Matrix, init: &KMeansInit) -> Result<()> {
        if batch.rows() == 0 {
            return Err(Error::BatchTooSmall {
                rows: 0,
                required: 1,
            });
        }
        if !self.is_fitted() {
            if batch.rows() < self.clusters {
                return Err(Error::BatchTooSmall {
                    rows: batch.rows(),
                    required: self.clusters,
                });
            }
            self.initial_fit(batch, init);
            return Ok(());
        }
        if batch.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: batch.cols(),
            });
        }
        // One mini-batch pass: assignments against frozen centroids, then
        // sequential per-sample updates.
        let assign = self.assign(batch);
        for (row_idx, &(k, _)) in assign.iter().enumerate() {
            self.counts[k] += 1;
            let lr = 1.0 / self.counts[k] as f64;
            let row = batch.row(row_idx);
            for (c, &x) in self.centroids.row_mut(k).iter_mut().zip(row) {
                *c += lr * (x - *c);
            }
        }
        Ok(())
    }

    /// Euclidean distances from every row to every centroid (`rows x c`).
    pub fn distances(&self, rows: &Matrix) -> Result<Matrix> {
        if !self.is_fitted() {
            return Err(Error::NotFitted);
        }
        if rows.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rows.cols(),
            });
        }
        let centroids = &self.centroids;
        let c = self.clusters;
        Ok(Matrix::build_rows(rows.rows(), c, |i, out| {
            let row = rows.row(i);
            for (k, d) in out.iter_mut().enumerate() {
                *d = sq_dist(row, centroids.row(k)).sqrt();
            }
        }))
    }

    /// Sum of squared distances to the nearest centroid.
    pub fn inertia(&self, rows: &Matrix) -> Result<f64> {
        if !self.is_fitted() {
            return Err(Error::NotFitted);
        }
        Ok(self.assign(rows).iter().map(|&(_, d2)| d2).sum())
    }

    fn initial_fit(&mut self, batch: &Matrix, init: &KMeansInit) {
        self.dim = batch.cols();
        let mut rng = ChaCha8Rng::seed_from_u64(init.seed);
        self.centroids = kmeans_plus_plus(batch, self.clusters, &mut rng);

        let mut assign = self.assign(batch);
        fix_empty_clusters(&mut self.centroids, batch, &mut assign);
        for _ in 0..init.iterations {
            self.update_means(batch, &assign);
            let mut next = self.assign(batch);
            fix_empty_clusters(&mut self.centroids, batch, &mut next);
            if next == assign {
                break;
            }
            assign = next;
        }
        self.update_means(batch, &assign);
        let mut counts = vec![0u64; self.clusters];
        for &(k, _) in &assign {
            counts[k] += 1;
        }
        self.counts = counts;
    }

    /// Nearest centroid and squared distance per row, ties to the lowest id.
    fn assign(&self, batch: &Matrix) -> Vec<(usize, f64)> {
        let centroids = &self.centroids;
        let c = self.clusters;
        (0..batch.rows())
            .into_par_iter()
            .with_min_len(16)
            .map(|i| {
                let row = batch.row(i);
                let mut best = (0usize, f64::INFINITY);
                for k in 0..c {
                    let d2 = sq_dist(row, centroids.row(k));
                    if d2 < best.1 {
                        best = (k, d2);
                    }
                }
                best
            })
            .collect()
    }

    fn update_means(&mut self, batch: &Matrix, assign: &[(usize, f64)]) {
        let mut sums = Matrix::zeros(self.clusters, self.dim);
        let mut sizes = vec![0u64; self.clusters];
        for (i, &(k, _)) in assign.iter().enumerate() {
            sizes[k] += 1;
            for (s, &x) in sums.row_mut(k).iter_mut().zip(batch.row(i)) {
                *s += x;
            }
        }
        for (k, &size) in sizes.iter().enumerate() {
            if size == 0 {
                continue; // keep the previous centroid
            }
            let inv = 1.0 / size as f64;
            for (c, &s) in self.centroids.row_mut(k).iter_mut().zip(sums.row(k)) {
                *c = s * inv;
            }
        }
    }
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

fn kmeans_plus_plus(batch: &Matrix, clusters: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let rows = batch.rows();
    let mut centroids = Matrix::zeros(clusters, batch.cols());
    let first = rng.random_range(0..rows);
    centroids.row_mut(0).copy_from_slice(batch.row(first));

    let mut d2: Vec<f64> = (0..rows)
        .map(|i| sq_dist(batch.row(i), centroids.row(0)))
        .collect();
    for k in 1..clusters {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let r = rng.random::<f64>() * total;
            let mut cum = 0.0;
            let mut chosen = rows - 1;
            for (i, &w) in d2.iter().enumerate() {
                cum += w;
                if cum > r {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            // All remaining mass at distance zero; any row works.
            rng.random_range(0..rows)
        };
        centroids.row_mut(k).copy_from_slice(batch.row(pick));
        for (i, d) in d2.iter_mut().enumerate() {
            let nd = sq_dist(batch.row(i), centroids.row(k));
            if nd < *d {
                *d = nd;
            }
        }
    }
    centroids
}

/// Re-seeds every empty cluster from the farthest unclaimed batch row.
fn fix_empty_clusters(centroids: &mut Matrix, batch: &Matrix, assign: &mut [(usize, f64)]) {
    let clusters = centroids.rows();
    let mut sizes = vec![0usize; clusters];
    for &(k, _) in assign.iter() {
        sizes[k] += 1;
    }
    let mut claimed = vec![false; assign.len()];
    loop {
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut far = usize::MAX;
        let mut far_d = -1.0;
        for (i, &(_, d2)) in assign.iter().enumerate() {
            if !claimed[i] && d2 > far_d {
                far = i;
                far_d = d2;
            }
        }
        debug_assert!(far != usize::MAX, "batch smaller than cluster count");
        let (old, _) = assign[far];
        sizes[old] -= 1;
        sizes[empty] += 1;
        assign[far] = (empty, 0.0);
        claimed[far] = true;
        centroids.row_mut(empty).copy_from_slice(batch.row(far));
    }
}
