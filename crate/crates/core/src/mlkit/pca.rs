//! Incremental PCA: streaming mean/covariance accumulation with a single
//! eigendecomposition at finalize.
//!
//! The concatenated representations this is fitted on are at most a few
//! thousand dimensions, so holding the covariance is cheap and the result is
//! exactly batch PCA with no incremental-SVD approximation error.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    components_requested: usize,
    dim: usize,
    count: u64,
    mean: Vec<f64>,
    /// Upper triangle of the centered scatter; cleared at finalize.
    scatter: Matrix,
    components: Matrix,
    explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn new(components: usize) -> Self {
        assert!(components >= 1, "PCA needs at least one component");
        Self {
            components_requested: components,
            dim: 0,
            count: 0,
            mean: Vec::new(),
            scatter: Matrix::zeros(0, 0),
            components: Matrix::zeros(0, 0),
            explained_variance: Vec::new(),
        }
    }

    /// Reconstructs a finalized model from stored state.
    pub fn from_parts(
        count: u64,
        mean: Vec<f64>,
        components: Matrix,
        explained_variance: Vec<f64>,
    ) -> Result<Self> {
        if components.cols() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: components.cols(),
            });
        }
        if components.rows() != explained_variance.len() {
            return Err(Error::DimensionMismatch {
                expected: components.rows(),
                got: explained_variance.len(),
            });
        }
        Ok(Self {
            components_requested: components.rows(),
            dim: mean.len(),
            count,
            mean,
            scatter: Matrix::zeros(0, 0),
            components,
            explained_variance,
        })
    }

    pub fn component_count(&self) -> usize {
        self.components_requested
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

    /// Orthonormal component rows (`p x dim`), available after finalize.
    pub fn components(&self) -> &Matrix {
        &self.components
    }

    /// Eigenvalues of the covariance for the kept components, nonincreasing.
    pub fn explained_variance(&self) -> &[f64] {
        &self.explained_variance
    }

    pub fn is_finalized(&self) -> bool {
        self.components.rows() > 0
    }

    pub fn partial_fit(&mut self, batch: &Matrix) -> Result<()> {
        if self.is_finalized() {
            return Err(Error::AlreadyFinalized);
        }
        if batch.rows() == 0 {
            return Ok(());
        }
        if self.dim == 0 {
            self.dim = batch.cols();
            self.mean = vec![0.0; self.dim];
            self.scatter = Matrix::zeros(self.dim, self.dim);
        } else if batch.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: batch.cols(),
            });
        }

        let dim = self.dim;
        let n_b = batch.rows() as f64;
        let mut batch_mean = vec![0.0; dim];
        for row in batch.iter_rows() {
            for (acc, &x) in batch_mean.iter_mut().zip(row) {
                *acc += x;
            }
        }
        for acc in &mut batch_mean {
            *acc /= n_b;
        }

        let mut centered = batch.clone();
        centered
            .data_mut()
            .par_chunks_mut(dim)
            .with_min_len(8)
            .for_each(|row| {
                for (x, &m) in row.iter_mut().zip(&batch_mean) {
                    *x -= m;
                }
            });

        // Batch scatter, upper triangle, one stripe per output row: each
        // entry is summed over batch rows in a fixed order.
        let rows = centered.rows();
        let centered_ref = &centered;
        let mut batch_scatter = Matrix::zeros(dim, dim);
        batch_scatter
            .data_mut()
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(i, out)| {
                for r in 0..rows {
                    let row = centered_ref.row(r);
                    let xi = row[i];
                    if xi == 0.0 {
                        continue;
                    }
                    for j in i..dim {
                        out[j] += xi * row[j];
                    }
                }
            });

        // Chan's merge of (mean, scatter) pairs; n_a == 0 degenerates to copy.
        let n_a = self.count as f64;
        let n = n_a + n_b;
        let factor = n_a * n_b / n;
        let delta: Vec<f64> = batch_mean
            .iter()
            .zip(&self.mean)
            .map(|(&bm, &m)| bm - m)
            .collect();
        for i in 0..dim {
            let srow = self.scatter.row_mut(i);
            let brow = batch_scatter.row(i);
            let di = delta[i];
            for j in i..dim {
                srow[j] += brow[j] + factor * di * delta[j];
            }
        }
        for (m, &d) in self.mean.iter_mut().zip(&delta) {
            *m += d * n_b / n;
        }
        self.count += batch.rows() as u64;
        Ok(())
    }

    /// Eigendecomposes the accumulated covariance and keeps the top
    /// components. The sign of each component is fixed by making its
    /// largest-magnitude entry positive.
    pub fn finalize(&mut self) -> Result<()> {
        if self.is_finalized() {
            return Err(Error::AlreadyFinalized);
        }
        let p = self.components_requested;
        if self.count < p as u64 {
            return Err(Error::TooFewSamples {
                count: self.count,
                required: p,
            });
        }
        if p > self.dim {
            return Err(Error::InvalidConfig(format!(
                "{p} PCA components requested from {}-dimensional data",
                self.dim
            )));
        }

        let dim = self.dim;
        let inv_n = 1.0 / self.count as f64;
        let mut cov = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            let row = self.scatter.row(i);
            for j in i..dim {
                let v = row[j] * inv_n;
                cov[(i, j)] = v;
                cov[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .total_cmp(&eig.eigenvalues[a])
                .then(a.cmp(&b))
        });

        let mut components = Matrix::zeros(p, dim);
        let mut explained = Vec::with_capacity(p);
        for (k, &src) in order.iter().take(p).enumerate() {
            explained.push(eig.eigenvalues[src].max(0.0));
            let col = eig.eigenvectors.column(src);
            let row = components.row_mut(k);
            for (dst, &x) in row.iter_mut().zip(col.iter()) {
                *dst = x;
            }
            let mut max_idx = 0;
            let mut max_abs = 0.0;
            for (i, &x) in row.iter().enumerate() {
                if x.abs() > max_abs {
                    max_abs = x.abs();
                    max_idx = i;
                }
            }
            if row[max_idx] < 0.0 {
                for x in row.iter_mut() {
                    *x = -*x;
                }
            }
        }

        self.components = components;
        self.explained_variance = explained;
        self.scatter = Matrix::zeros(0, 0);
        Ok(())
    }

    /// Projects rows onto the kept components: `(x - mean) C^T`.
    pub fn transform(&self, rows: &Matrix) -> Result<Matrix> {
        if !self.is_finalized() {
            return Err(Error::NotFinalized);
        }
        if rows.cols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rows.cols(),
            });
        }
        let p = self.components_requested;
        let mean = &self.mean;
        let components = &self.components;
        Ok(Matrix::build_rows(rows.rows(), p, |i, out| {
            let row = rows.row(i);
            for (k, y) in out.iter_mut().enumerate() {
                let comp = components.row(k);
                let mut acc = 0.0;
                for ((&x, &m), &c) in row.iter().zip(mean).zip(comp) {
                    acc += (x - m) * c;
                }
                *y = acc;
            }
        }))
    }
}
