//! Ordinary-least-squares R-squared on a held-out node split.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Fits OLS with intercept (normal equations with ridge jitter 1e-8) on a
/// seeded `train_fraction` split and reports R-squared on the held-out rows.
/// A degenerate held-out target variance is an error: R-squared is undefined
/// there.
pub fn r2_score(
    embeddings: &Matrix,
    target: &[f64],
    train_fraction: f64,
    seed: u64,
) -> Result<f64> {
    let n = embeddings.rows();
    let p = embeddings.cols();
    if target.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: target.len(),
        });
    }
    if !(0.0 < train_fraction && train_fraction < 1.0) {
        return Err(Error::InvalidConfig(
            "train fraction must be in (0, 1)".into(),
        ));
    }
    if n < 2 * (p + 1) {
        return Err(Error::TooFewSamples {
            count: n as u64,
            required: 2 * (p + 1),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let n_train = ((train_fraction * n as f64).round() as usize).clamp(p + 1, n - 1);
    let (train_idx, test_idx) = order.split_at(n_train);

    // Normal equations over [1 | X].
    let d = p + 1;
    let mut xtx = DMatrix::<f64>::zeros(d, d);
    let mut xty = DVector::<f64>::zeros(d);
    let mut xrow = vec![0.0; d];
    for &i in train_idx {
        xrow[0] = 1.0;
        xrow[1..].copy_from_slice(embeddings.row(i));
        for a in 0..d {
            for b in a..d {
                xtx[(a, b)] += xrow[a] * xrow[b];
            }
            xty[a] += xrow[a] * target[i];
        }
    }
    for a in 0..d {
        for b in 0..a {
            xtx[(a, b)] = xtx[(b, a)];
        }
        xtx[(a, a)] += 1e-8;
    }
    let beta = match xtx.clone().cholesky() {
        Some(ch) => ch.solve(&xty),
        None => xtx
            .lu()
            .solve(&xty)
            .ok_or_else(|| Error::InvalidConfig("normal equations are singular".into()))?,
    };

    let mean_test = test_idx.iter().map(|&i| target[i]).sum::<f64>() / test_idx.len() as f64;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for &i in test_idx {
        let mut pred = beta[0];
        for (j, &x) in embeddings.row(i).iter().enumerate() {
            pred += beta[j + 1] * x;
        }
        ss_res += (target[i] - pred) * (target[i] - pred);
        ss_tot += (target[i] - mean_test) * (target[i] - mean_test);
    }
    let scale = test_idx.len() as f64 * (1.0 + mean_test * mean_test);
    if ss_tot <= 1e-24 * scale {
        return Err(Error::DegenerateTarget);
    }
    Ok(1.0 - ss_res / ss_tot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_embeddings(n: usize, p: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_vec(
            n,
            p,
            (0..n * p)
                .map(|_| rng.random::<f64>() * 2.0 - 1.0)
                .collect(),
        )
    }

    #[test]
    fn linear_target_is_fully_explained() {
        let emb = random_embeddings(200, 5, 1);
        let target: Vec<f64> = emb
            .iter_rows()
            .map(|r| {
                3.0 + r
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| (j as f64 + 1.0) * x)
                    .sum::<f64>()
            })
            .collect();
        let r2 = r2_score(&emb, &target, 0.75, 42).unwrap();
        assert!((r2 - 1.0).abs() < 1e-6, "r2 = {r2}");
    }

    #[test]
    fn independent_noise_explains_nothing() {
        let emb = random_embeddings(2000, 5, 2);
        for seed in 0..10 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let target: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
            let r2 = r2_score(&emb, &target, 0.75, seed).unwrap();
            assert!(r2 <= 0.2, "seed {seed}: r2 = {r2}");
        }
    }

    #[test]
    fn degenerate_target_is_reported() {
        let emb = random_embeddings(100, 3, 3);
        let target = vec![4.0; 100];
        assert!(matches!(
            r2_score(&emb, &target, 0.75, 0),
            Err(Error::DegenerateTarget)
        ));
    }

    #[test]
    fn too_few_rows_rejected() {
        let emb = random_embeddings(10, 5, 4);
        let target = vec![0.0; 10];
        assert!(matches!(
            r2_score(&emb, &target, 0.75, 0),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
