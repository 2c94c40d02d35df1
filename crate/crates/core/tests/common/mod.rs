//! Shared test helpers, including an independent dense ridge oracle.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian elimination with partial pivoting on plain row-major vectors.
/// Solves `A X = B` for square `A`; panics on an exactly singular pivot.
pub fn gauss_solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let m = b.ncols();
    let mut aug: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a[(i, j)])
                .chain((0..m).map(|j| b[(i, j)]))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))
            .unwrap();
        aug.swap(col, pivot);
        let p = aug[col][col];
        assert!(p != 0.0, "singular system in oracle");
        for row in col + 1..n {
            let f = aug[row][col] / p;
            if f != 0.0 {
                for k in col..n + m {
                    aug[row][k] -= f * aug[col][k];
                }
            }
        }
    }
    let mut x = DMatrix::zeros(n, m);
    for j in 0..m {
        for i in (0..n).rev() {
            let mut s = aug[i][n + j];
            for k in i + 1..n {
                s -= aug[i][k] * x[(k, j)];
            }
            x[(i, j)] = s / aug[i][i];
        }
    }
    x
}

/// Ridge solution from explicitly formed normal equations, choosing the
/// smaller system (the larger one is numerically singular at huge `C`).
pub fn ridge_oracle(h: &DMatrix<f64>, t: &DMatrix<f64>, c: f64) -> DMatrix<f64> {
    let (n, nh) = h.shape();
    if n >= nh {
        let mut g = h.transpose() * h;
        for i in 0..nh {
            g[(i, i)] += 1.0 / c;
        }
        gauss_solve(&g, &(h.transpose() * t))
    } else {
        let mut g = h * h.transpose();
        for i in 0..n {
            g[(i, i)] += 1.0 / c;
        }
        h.transpose() * gauss_solve(&g, t)
    }
}

/// `‖B − C·Hᵀ(T − HB)‖_F`, the gradient of the ridge objective.
pub fn stationarity_residual(h: &DMatrix<f64>, t: &DMatrix<f64>, b: &DMatrix<f64>, c: f64) -> f64 {
    (b - h.transpose() * (t - h * b) * c).norm()
}

pub fn ridge_objective(h: &DMatrix<f64>, t: &DMatrix<f64>, b: &DMatrix<f64>, c: f64) -> f64 {
    0.5 * b.norm_squared() + 0.5 * c * (t - h * b).norm_squared()
}

pub fn rel_frobenius(a: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    (a - reference).norm() / reference.norm().max(f64::MIN_POSITIVE)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rows: usize, cols: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(lo..hi))
}

/// Uniform orthogonal matrix via QR of a Gaussian matrix with sign fix.
pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    use rand_distr::{Distribution, StandardNormal};
    let g = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Mean squared distance of each column to the column mean — the error of
/// reconstructing every sample with the mean image.
pub fn mean_image_error(x: &DMatrix<f64>) -> f64 {
    let mean = x.column_mean();
    x.column_iter()
        .map(|c| (c - &mean).norm_squared())
        .sum::<f64>()
        / x.ncols() as f64
}
