//! Dense row-major `f64` matrix used throughout the embedding pipeline.
//!
//! Row-parallel construction is the one concurrency primitive the pipeline
//! needs: every stage writes each output row from read-only inputs, so
//! results are bitwise identical regardless of thread count.

use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Wraps an existing row-major buffer. Panics if the length is wrong.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length != rows*cols");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * cols);
        for r in &rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: n,
            cols,
            data,
        }
    }

    /// Builds each row in parallel with `fill(row_index, row_slice)`.
    pub fn build_rows<F>(rows: usize, cols: usize, fill: F) -> Self
    where
        F: Fn(usize, &mut [f64]) + Sync,
    {
        let mut m = Self::zeros(rows, cols);
        if cols == 0 {
            return m;
        }
        m.data
            .par_chunks_mut(cols)
            .with_min_len(8)
            .enumerate()
            .for_each(|(i, row)| fill(i, row));
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols.max(1))
    }

    /// Column-wise concatenation; all parts must have the same row count.
    pub fn hstack(parts: &[&Matrix]) -> Self {
        let rows = parts.first().map_or(0, |m| m.rows);
        let cols: usize = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(rows, cols);
        for r in 0..rows {
            let dst = out.row_mut(r);
            let mut at = 0;
            for m in parts {
                assert_eq!(m.rows, rows, "hstack with unequal row counts");
                dst[at..at + m.cols].copy_from_slice(m.row(r));
                at += m.cols;
            }
        }
        out
    }

    /// Largest absolute entry-wise difference; infinity on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
