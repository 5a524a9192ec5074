//! The small generalised (Ritz) system of one IRM step.
//!
//! Given coordinate vectors `phi_1..phi_m` and a residual `r`, the increment
//! `p = Phi a` minimising the energy over `span(Phi)` solves
//! `(Phi' A Phi) a = Phi' r`. The factorisation is an in-order LDL' without
//! row exchanges; an equation whose pivot collapses (its vector is, within
//! tolerance, A-dependent on those already accepted) is discarded and its
//! coefficient set to zero.

use crate::error::{IrmError, Result};
use crate::linalg::{dot, Operator};

/// Coordinate vectors spanning the search subspace of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    vectors: Vec<Vec<f64>>,
}

impl SubspaceBasis {
    pub fn new(vectors: Vec<Vec<f64>>) -> Self {
        assert!(!vectors.is_empty(), "subspace basis must hold at least one vector");
        let n = vectors[0].len();
        assert!(
            vectors.iter().all(|v| v.len() == n),
            "subspace basis vectors must share one length"
        );
        SubspaceBasis { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn len_n(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn as_slices(&self) -> Vec<&[f64]> {
        self.vectors.iter().map(Vec::as_slice).collect()
    }

    pub fn into_vectors(self) -> Vec<Vec<f64>> {
        self.vectors
    }
}

/// `abar = Phi' A Phi` (row-major, symmetrised) and `rbar = Phi' r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSystem {
    m: usize,
    abar: Vec<f64>,
    rbar: Vec<f64>,
    asymmetry: f64,
}

/// Coefficients of the increment and the indices that survived pivoting.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSolution {
    pub coeffs: Vec<f64>,
    pub kept: Vec<usize>,
}

impl ReducedSolution {
    pub fn dropped(&self) -> usize {
        self.coeffs.len() - self.kept.len()
    }
}

impl ReducedSystem {
    /// Builds a system from an explicit matrix and right-hand side.
    /// The matrix is symmetrised by averaging with its transpose.
    pub fn from_parts(m: usize, abar: Vec<f64>, rbar: Vec<f64>) -> Self {
        assert_eq!(abar.len(), m * m, "abar must be m x m");
        assert_eq!(rbar.len(), m, "rbar must have length m");
        let mut rs = ReducedSystem {
            m,
            abar,
            rbar,
            asymmetry: 0.0,
        };
        rs.symmetrize();
        rs
    }

    fn symmetrize(&mut self) {
        let m = self.m;
        let mut defect = 0.0f64;
        for j in 0..m {
            for k in (j + 1)..m {
                let (u, l) = (self.abar[j * m + k], self.abar[k * m + j]);
                defect = defect.max((u - l).abs());
                let avg = 0.5 * (u + l);
                self.abar[j * m + k] = avg;
                self.abar[k * m + j] = avg;
            }
        }
        self.asymmetry = defect;
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn abar(&self, j: usize, k: usize) -> f64 {
        self.abar[j * self.m + k]
    }

    pub fn rbar(&self) -> &[f64] {
        &self.rbar
    }

    pub fn rbar_mut(&mut self) -> &mut [f64] {
        &mut self.rbar
    }

    /// Largest `|abar[j][k] - abar[k][j]|` seen before averaging.
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn max_abs(&self) -> f64 {
        self.abar.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `Abar*a - rbar`, the gradient of the energy decrement.
    pub fn gradient(&self, a: &[f64]) -> Vec<f64> {
        let m = self.m;
        (0..m)
            .map(|j| (0..m).map(|k| self.abar[j * m + k] * a[k]).sum::<f64>() - self.rbar[j])
            .collect()
    }
}

/// Forms the reduced system with one operator application per basis vector.
pub fn assemble<O: Operator + ?Sized>(op: &O, basis: &SubspaceBasis, r: &[f64]) -> ReducedSystem {
    assert_eq!(basis.len_n(), op.dim(), "assemble: dimension mismatch");
    let products: Vec<Vec<f64>> = basis.vectors().iter().map(|v| op.apply(v)).collect();
    assemble_from_products(basis, &products, r)
}

/// Forms the reduced system from precomputed products `products[k] = A*phi_k`.
pub fn assemble_from_products(basis: &SubspaceBasis, products: &[Vec<f64>], r: &[f64]) -> ReducedSystem {
    let m = basis.dim();
    assert_eq!(products.len(), m, "assemble: one product per basis vector required");
    assert_eq!(r.len(), basis.len_n(), "assemble: dimension mismatch");
    let phi = basis.vectors();
    let mut abar = vec![0.0; m * m];
    for j in 0..m {
        for k in 0..m {
            abar[j * m + k] = dot(&phi[j], &products[k]);
        }
    }
    let rbar = phi.iter().map(|v| dot(v, r)).collect();
    ReducedSystem::from_parts(m, abar, rbar)
}

/// Solves the reduced system by in-order LDL' with pivot dropping.
///
/// The system is first scaled to unit diagonal, so the pivot of equation `k`
/// is the fraction of `||phi_k||_A^2` not already spanned by the accepted
/// vectors. Pivots at or below `pivot_tol` drop the equation; pivots below
/// `-pivot_tol` mean the operator is not positive definite.
pub fn solve(rs: &ReducedSystem, pivot_tol: f64) -> Result<ReducedSolution> {
    assert!(pivot_tol > 0.0, "pivot_tol must be positive");
    let m = rs.m;
    let mut scale = vec![0.0; m];
    let mut usable = vec![true; m];
    for k in 0..m {
        let d = rs.abar(k, k);
        if d < 0.0 || d.is_nan() {
            return Err(IrmError::NotPositiveDefinite(format!("reduced diagonal {k} is {d:e}")));
        }
        if d == 0.0 {
            usable[k] = false;
        } else {
            scale[k] = 1.0 / d.sqrt();
        }
    }
    let s = |j: usize, k: usize| rs.abar(j, k) * scale[j] * scale[k];

    // unit lower factor, only rows/cols in `kept` are meaningful
    let mut l = vec![0.0; m * m];
    let mut piv = vec![0.0; m];
    let mut kept: Vec<usize> = Vec::with_capacity(m);
    for k in 0..m {
        if !usable[k] {
            continue;
        }
        for (idx, &j) in kept.iter().enumerate() {
            let mut v = s(k, j);
            for &i in &kept[..idx] {
                v -= l[k * m + i] * l[j * m + i] * piv[i];
            }
            l[k * m + j] = v / piv[j];
        }
        let mut d = s(k, k);
        for &j in &kept {
            d -= l[k * m + j] * l[k * m + j] * piv[j];
        }
        if d < -pivot_tol {
            return Err(IrmError::NotPositiveDefinite(format!(
                "reduced pivot {k} is {d:e} after scaling"
            )));
        }
        if d > pivot_tol {
            piv[k] = d;
            kept.push(k);
        }
    }

    let mut coeffs = vec![0.0; m];
    if kept.is_empty() {
        if rs.rbar.iter().any(|&v| v != 0.0) {
            return Err(IrmError::DegenerateBasis);
        }
        return Ok(ReducedSolution { coeffs, kept });
    }

    // L y = W rbar, D z = y, L' w = z, a = W w
    let mut y = vec![0.0; m];
    for (idx, &k) in kept.iter().enumerate() {
        let mut v = rs.rbar[k] * scale[k];
        for &j in &kept[..idx] {
            v -= l[k * m + j] * y[j];
        }
        y[k] = v;
    }
    for &k in &kept {
        y[k] /= piv[k];
    }
    for (idx, &k) in kept.iter().enumerate().rev() {
        let mut v = y[k];
        for &j in &kept[idx + 1..] {
            v -= l[j * m + k] * coeffs[j];
        }
        coeffs[k] = v;
    }
    for &k in &kept {
        coeffs[k] *= scale[k];
    }
    Ok(ReducedSolution { coeffs, kept })
}
