//! Symmetric positive definite matrices in compressed sparse row storage.
//!
//! Both triangles are stored. Construction checks exact structural and
//! numerical symmetry, strictly increasing column indices per row and a
//! strictly positive diagonal. Positive definiteness itself is only probed
//! statistically (see [`SparseSpdMatrix::spd_probe`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{IrmError, Result};

/// Row count above which the parallel kernel splits work across threads.
#[cfg(feature = "parallel")]
const PAR_ROW_THRESHOLD: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSpdMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSpdMatrix {
    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn from_csr(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n + 1 || row_offsets[0] != 0 {
            return Err(IrmError::InvalidMatrix("row_offsets must have length n+1 and start at 0".into()));
        }
        if col_indices.len() != values.len() || row_offsets[n] != values.len() {
            return Err(IrmError::InvalidMatrix("row_offsets/col_indices/values lengths disagree".into()));
        }
        let m = SparseSpdMatrix {
            n,
            row_offsets,
            col_indices,
            values,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicate entries
    /// are summed in the order given. Both triangles must be supplied.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(IrmError::InvalidMatrix(format!("entry ({i}, {j}) outside {n}x{n}")));
            }
            if !v.is_finite() {
                return Err(IrmError::InvalidMatrix(format!("non-finite value at ({i}, {j})")));
            }
        }
        // stable: duplicates keep their input order
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut row_offsets = vec![0usize; n + 1];
        let mut col_indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (i, j, v) = triplets[k];
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_indices.push(j);
                values.push(v);
                row_offsets[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_offsets[i + 1] += row_offsets[i];
        }
        Self::from_csr(n, row_offsets, col_indices, values)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        Self::from_csr(n, (0..=n).collect(), (0..n).collect(), diag.to_vec())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n]).expect("identity is valid")
    }

    /// Builds a matrix from a dense row-major square array, keeping nonzeros.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        assert_eq!(dense.len(), n * n, "from_dense: expected n*n entries");
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = dense[i * n + j];
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &triplets)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
            if lo > hi {
                return Err(IrmError::InvalidMatrix(format!("row_offsets decrease at row {i}")));
            }
            let cols = &self.col_indices[lo..hi];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(IrmError::InvalidMatrix(format!(
                    "column indices not strictly increasing in row {i}"
                )));
            }
            if cols.last().is_some_and(|&c| c >= n) {
                return Err(IrmError::InvalidMatrix(format!("column index out of range in row {i}")));
            }
            if self.values[lo..hi].iter().any(|v| !v.is_finite()) {
                return Err(IrmError::InvalidMatrix(format!("non-finite value in row {i}")));
            }
            match self.get(i, i) {
                Some(d) if d > 0.0 => {}
                _ => {
                    return Err(IrmError::InvalidMatrix(format!(
                        "diagonal entry {i} missing or not strictly positive"
                    )))
                }
            }
        }
        for i in 0..n {
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                let j = self.col_indices[k];
                if self.get(j, i) != Some(self.values[k]) {
                    return Err(IrmError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i).unwrap_or(0.0)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    #[inline]
    fn row_dot(&self, i: usize, v: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter().zip(vals).fold(0.0, |acc, (&j, &a)| acc + a * v[j])
    }

    /// Single-threaded product `A*v`, ascending column order within each row.
    pub fn spmv_serial(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n, "spmv: dimension mismatch");
        (0..self.n).map(|i| self.row_dot(i, v)).collect()
    }

    /// Row-parallel product. Each row is reduced by one thread in the same
    /// order as [`Self::spmv_serial`], so the output is bit-identical.
    #[cfg(feature = "parallel")]
    pub fn spmv_parallel(&self, v: &[f64]) -> Vec<f64> {
        use rayon::prelude::*;
        assert_eq!(v.len(), self.n, "spmv: dimension mismatch");
        let mut out = vec![0.0; self.n];
        out.par_iter_mut()
            .with_min_len(256)
            .enumerate()
            .for_each(|(i, o)| *o = self.row_dot(i, v));
        out
    }

    /// `A*v`, dispatching to the row-parallel kernel for large matrices
    /// when the `parallel` feature is enabled.
    pub fn spmv(&self, v: &[f64]) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        if self.n >= PAR_ROW_THRESHOLD {
            return self.spmv_parallel(v);
        }
        self.spmv_serial(v)
    }

    /// Checks `v'Av > 0` for `samples` random vectors. Returns the smallest
    /// Rayleigh quotient seen, or an error if any sample is non-positive.
    pub fn spd_probe(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut min_rq = f64::INFINITY;
        for _ in 0..samples {
            let v: Vec<f64> = (0..self.n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let vv = super::dot(&v, &v);
            if vv == 0.0 {
                continue;
            }
            let vav = super::dot(&v, &self.spmv(&v));
            if !(vav > 0.0) {
                return Err(IrmError::NotPositiveDefinite(format!("probe found v'Av = {vav:e}")));
            }
            min_rq = min_rq.min(vav / vv);
        }
        Ok(min_rq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSpdMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        SparseSpdMatrix::from_triplets(n, &t).unwrap()
    }

    #[test]
    fn spmv_examples() {
        assert_eq!(SparseSpdMatrix::identity(3).spmv(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        let d = SparseSpdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        assert_eq!(d.spmv(&[1.0, 1.0]), vec![1.0, 4.0]);
        assert_eq!(laplacian_1d(3).spmv(&[1.0, 1.0, 1.0]), vec![1.0, 0.0, 1.0]);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn spmv_rejects_wrong_length() {
        SparseSpdMatrix::identity(3).spmv(&[1.0]);
    }

    #[test]
    fn rejects_asymmetric_triplets() {
        let err = SparseSpdMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, 1.0), (1, 0, 0.5)]).unwrap_err();
        assert!(matches!(err, IrmError::NotSymmetric { .. }));
        let err = SparseSpdMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 1, 1.0), (1, 0, 0.5), (0, 1, 0.25)])
            .unwrap_err();
        assert!(matches!(err, IrmError::NotSymmetric { .. }));
    }

    #[test]
    fn rejects_bad_diagonal() {
        assert!(SparseSpdMatrix::from_diagonal(&[1.0, 0.0]).is_err());
        assert!(SparseSpdMatrix::from_triplets(2, &[(0, 0, 1.0)]).is_err());
    }

    #[test]
    fn duplicates_are_summed() {
        let m = SparseSpdMatrix::from_triplets(1, &[(0, 0, 1.0), (0, 0, 2.5)]).unwrap();
        assert_eq!(m.get(0, 0), Some(3.5));
    }

    #[test]
    fn probe_flags_indefinite() {
        // diag-dominant fails, but [[1,2],[2,1]] is indefinite
        let m = SparseSpdMatrix::from_dense(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(m.spd_probe(100, 1).is_err());
        assert!(laplacian_1d(10).spd_probe(100, 1).is_ok());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_kernel_is_bit_identical() {
        let m = laplacian_1d(5000);
        let v: Vec<f64> = (0..5000).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(m.spmv_serial(&v), m.spmv_parallel(&v));
    }
}
