//! Streaming standardizing scaler.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Per-dimension running mean and sum of squared deviations, merged batch by
/// batch (Chan's parallel update). Uses population variance (divide by n).
/// Dimensions with zero standard deviation transform to 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Scaler {
    dim: usize,
    count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Scaler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reconstructs a fitted scaler from stored state.
    pub fn from_parts(count: u64, mean: Vec<f64>, m2: Vec<f64>) -> Result<Self> {
        if mean.len() != m2.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: m2.len(),
            });
        }
        Ok(Self {
            dim: mean.len(),
            count,
            mean,
            m2,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn m2(&self) -> &[f64] {
        &self.m2
    }

    /// Population standard deviation per dimension.
    pub fn std(&self) -> Vec<f64> {
        let n = self.count.max(1) as f64;
        self.m2.iter().map(|&m| (m / n).sqrt()).collect()
    }

    pub fn is_fitted(&self) -> bool {
        self.count > 0
    }

    /// Folds one batch into the running statistics. The first batch fixes the
    /// dimensionality.
    pub fn partial_fit(&mut self, batch: &Matrix) -> Result<()> {
        if batch.rows() == 0 {
            return Ok(());
        }
        if self.dim == 0 {
            self.dim = batch.cols();
            self.mean = vec![0.0; self.dim];
            self.m2 = vec![0.0; self.dim];
        } else if batch.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: batch.cols(),
            });
        }

        let n_b = batch.rows() as f64;
        let mut batch_mean = vec![0.0; self.dim];
        for row in batch.iter_rows() {
            for (acc, &x) in batch_mean.iter_mut().zip(row) {
                *acc += x;
            }
        }
        for acc in &mut batch_mean {
            *acc /= n_b;
        }
        let mut batch_m2 = vec![0.0; self.dim];
        for row in batch.iter_rows() {
            for ((acc, &m), &x) in batch_m2.iter_mut().zip(&batch_mean).zip(row) {
                let d = x - m;
                *acc += d * d;
            }
        }

        let n_a = self.count as f64;
        let n = n_a + n_b;
        for d in 0..self.dim {
            let delta = batch_mean[d] - self.mean[d];
            self.mean[d] += delta * n_b / n;
            self.m2[d] += batch_m2[d] + delta * delta * n_a * n_b / n;
        }
        self.count += batch.rows() as u64;
        Ok(())
    }

    /// `(x - mean) / std` per dimension; zero-variance dimensions map to 0.
    pub fn transform(&self, batch: &Matrix) -> Result<Matrix> {
        if !self.is_fitted() {
            return Err(Error::NotFitted);
        }
        if batch.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: batch.cols(),
            });
        }
        let inv_std: Vec<f64> = self
            .std()
            .iter()
            .map(|&s| if s == 0.0 { 0.0 } else { 1.0 / s })
            .collect();
        let mut out = batch.clone();
        let (dim, mean) = (self.dim, &self.mean);
        if dim > 0 {
            out.data_mut()
                .par_chunks_mut(dim)
                .with_min_len(8)
                .for_each(|row| {
                    for ((x, &m), &inv) in row.iter_mut().zip(mean).zip(&inv_std) {
                        *x = (*x - m) * inv;
                    }
                });
        }
        Ok(out)
    }
}
