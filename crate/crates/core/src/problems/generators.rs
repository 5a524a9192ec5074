//! Synthetic test matrices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{IrmError, Result};
use crate::linalg::SparseSpdMatrix;

pub fn gen_diagonal(spectrum: &[f64]) -> Result<SparseSpdMatrix> {
    if spectrum.is_empty() {
        return Err(IrmError::InvalidConfig("spectrum is empty".into()));
    }
    if let Some(v) = spectrum.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(IrmError::InvalidConfig(format!("spectrum entry {v} is not positive")));
    }
    SparseSpdMatrix::from_diagonal(spectrum)
}

/// `n` values spaced evenly in log scale from 1 to `kappa`.
pub fn log_spectrum(n: usize, kappa: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..n).map(|i| kappa.powf(i as f64 / (n - 1) as f64)).collect(),
    }
}

/// 7-point Laplacian on a `g^3` grid with Dirichlet boundary.
pub fn gen_laplacian3d(g: usize) -> Result<SparseSpdMatrix> {
    if g < 2 {
        return Err(IrmError::InvalidConfig(format!("grid size must be at least 2, got {g}")));
    }
    let idx = |i: usize, j: usize, k: usize| i + g * (j + g * k);
    let mut t = Vec::with_capacity(7 * g * g * g);
    for k in 0..g {
        for j in 0..g {
            for i in 0..g {
                let row = idx(i, j, k);
                t.push((row, row, 6.0));
                let mut link = |col: usize| t.push((row, col, -1.0));
                if i > 0 {
                    link(idx(i - 1, j, k));
                }
                if i + 1 < g {
                    link(idx(i + 1, j, k));
                }
                if j > 0 {
                    link(idx(i, j - 1, k));
                }
                if j + 1 < g {
                    link(idx(i, j + 1, k));
                }
                if k > 0 {
                    link(idx(i, j, k - 1));
                }
                if k + 1 < g {
                    link(idx(i, j, k + 1));
                }
            }
        }
    }
    SparseSpdMatrix::from_triplets(g * g * g, &t)
}

fn reflect_both_sides(m: &mut [f64], n: usize, v: &[f64]) {
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let s = 2.0 / vv;
    // M <- H M with H = I - s v v'
    for col in 0..n {
        let d: f64 = (0..n).map(|i| v[i] * m[i * n + col]).sum();
        for i in 0..n {
            m[i * n + col] -= s * d * v[i];
        }
    }
    // M <- M H
    for row in 0..n {
        let d: f64 = (0..n).map(|j| m[row * n + j] * v[j]).sum();
        for j in 0..n {
            m[row * n + j] -= s * d * v[j];
        }
    }
}

/// Dense SPD matrix `Q diag(1..kappa) Q'` with `Q` a product of two random
/// Householder reflections. The spectrum is log-spaced; the result is
/// symmetrised exactly from its upper triangle.
pub fn random_spd(n: usize, kappa: f64, seed: u64) -> Result<SparseSpdMatrix> {
    if n == 0 || !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(IrmError::InvalidConfig(format!("random problem needs n >= 1 and kappa >= 1, got n={n}, kappa={kappa}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = vec![0.0; n * n];
    for (i, l) in log_spectrum(n, kappa).into_iter().enumerate() {
        m[i * n + i] = l;
    }
    for _ in 0..2 {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        reflect_both_sides(&mut m, n, &v);
    }
    for i in 0..n {
        for j in 0..i {
            m[i * n + j] = m[j * n + i];
        }
    }
    SparseSpdMatrix::from_dense(n, &m)
}

/// Uniform entries in `[-1, 1)`.
pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
