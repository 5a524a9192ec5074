//! Extreme eigenvalue estimates from symmetric Lanczos.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{IrmError, Result};
use crate::linalg::{axpy_in_place, dot, norm2, scale, SparseSpdMatrix};

/// Matrices up to this size keep every Lanczos vector and reorthogonalise
/// against all of them.
pub const FULL_REORTH_MAX_N: usize = 2000;

const START_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionEstimate {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub kappa: f64,
    pub iterations: usize,
    /// The recurrence hit an invariant subspace before `iters` steps.
    pub breakdown: bool,
}

/// Number of eigenvalues of the tridiagonal `(alpha, beta)` below `x`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..alpha.len() {
        let off = if i == 0 { 0.0 } else { beta[i - 1] * beta[i - 1] / q };
        q = alpha[i] - x - off;
        if q == 0.0 {
            q = -f64::EPSILON * (alpha[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th smallest eigenvalue (0-based) of the tridiagonal matrix by bisection.
fn tridiag_eigenvalue(alpha: &[f64], beta: &[f64], k: usize) -> f64 {
    let m = alpha.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 } + if i + 1 < m { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-15 * lo.abs().max(hi.abs()) {
            break;
        }
        if sturm_count(alpha, beta, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Runs up to `iters` Lanczos steps from a fixed pseudo-random start and
/// reports the extreme Ritz values.
pub fn estimate_condition(a: &SparseSpdMatrix, iters: usize) -> Result<ConditionEstimate> {
    if iters < 20 {
        return Err(IrmError::InvalidConfig(format!("Lanczos needs at least 20 iterations, got {iters}")));
    }
    let n = a.n();
    let full = n <= FULL_REORTH_MAX_N;
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let v0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut v = scale(1.0 / norm2(&v0), &v0);
    let mut v_prev = vec![0.0; n];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut breakdown = false;
    let mut b_prev = 0.0;

    for step in 0..iters.min(n) {
        if full {
            basis.push(v.clone());
        }
        let mut w = a.spmv(&v);
        let al = dot(&w, &v);
        axpy_in_place(-al, &v, &mut w);
        axpy_in_place(-b_prev, &v_prev, &mut w);
        if full {
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    axpy_in_place(-c, q, &mut w);
                }
            }
        }
        alpha.push(al);
        let b = norm2(&w);
        if step + 1 == iters.min(n) {
            break;
        }
        if b <= 1e-14 * al.abs().max(b_prev) {
            breakdown = step + 1 < n;
            break;
        }
        beta.push(b);
        v_prev = std::mem::replace(&mut v, scale(1.0 / b, &w));
        b_prev = b;
    }

    let m = alpha.len();
    let lambda_min = tridiag_eigenvalue(&alpha, &beta, 0);
    let lambda_max = tridiag_eigenvalue(&alpha, &beta, m - 1);
    Ok(ConditionEstimate {
        lambda_max,
        lambda_min,
        kappa: lambda_max / lambda_min,
        iterations: m,
        breakdown,
    })
}
