//! Vectors, the sparse SPD operator and the energy functional.

mod csr;
mod vector;

use std::cell::Cell;

pub use csr::SparseSpdMatrix;
pub use vector::{
    all_finite, axpy, axpy_in_place, combine, dot, norm2, rel_diff2, rel_diff_inf, scale, sub,
};

/// `f(x) = 1/2 x'Ax - x'b`, evaluated as `0.5*dot(x, A*x) - dot(x, b)`.
pub fn energy(a: &SparseSpdMatrix, b: &[f64], x: &[f64]) -> f64 {
    assert_eq!(b.len(), a.n(), "energy: dimension mismatch");
    assert_eq!(x.len(), a.n(), "energy: dimension mismatch");
    0.5 * dot(x, &a.spmv(x)) - dot(x, b)
}

/// Same functional as [`energy`], accumulated in double-double arithmetic.
///
/// Energy differences between late iterates fall far below one ulp of `f`,
/// so the plain evaluation cannot resolve them. Every product and sum here
/// carries its rounding error, which keeps successive values ordered
/// correctly down to roughly `1e-30 * sum |terms|`.
pub fn energy_compensated(a: &SparseSpdMatrix, b: &[f64], x: &[f64]) -> f64 {
    assert_eq!(b.len(), a.n(), "energy: dimension mismatch");
    assert_eq!(x.len(), a.n(), "energy: dimension mismatch");
    let mut quad = DoubleDouble::ZERO;
    for i in 0..a.n() {
        let (cols, vals) = a.row(i);
        let mut row = DoubleDouble::ZERO;
        for (&j, &v) in cols.iter().zip(vals) {
            row = row.add(DoubleDouble::mul_f64(v, x[j]));
        }
        quad = quad.add(row.mul_scalar(x[i]));
    }
    let mut lin = DoubleDouble::ZERO;
    for (xi, bi) in x.iter().zip(b) {
        lin = lin.add(DoubleDouble::mul_f64(*xi, *bi));
    }
    quad.mul_scalar(0.5).add(lin.neg()).to_f64()
}

#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ZERO: Self = DoubleDouble { hi: 0.0, lo: 0.0 };

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    #[inline]
    fn mul_f64(a: f64, b: f64) -> Self {
        let p = a * b;
        DoubleDouble {
            hi: p,
            lo: a.mul_add(b, -p),
        }
    }

    #[inline]
    fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = Self::two_sum(s, e);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn mul_scalar(self, s: f64) -> Self {
        let p = Self::mul_f64(self.hi, s);
        let lo = p.lo + self.lo * s;
        let (hi, lo) = Self::two_sum(p.hi, lo);
        DoubleDouble { hi, lo }
    }

    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// A symmetric linear operator `v -> A*v`.
pub trait Operator {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[f64]) -> Vec<f64>;
}

impl Operator for SparseSpdMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.spmv(v)
    }
}

impl Operator for CountingOperator<'_> {
    fn dim(&self) -> usize {
        self.matrix.n()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        CountingOperator::apply(self, v)
    }
}

/// Borrowed operator that counts matrix-vector products.
#[derive(Debug)]
pub struct CountingOperator<'a> {
    matrix: &'a SparseSpdMatrix,
    count: Cell<u64>,
}

impl<'a> CountingOperator<'a> {
    pub fn new(matrix: &'a SparseSpdMatrix) -> Self {
        CountingOperator {
            matrix,
            count: Cell::new(0),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.count.set(self.count.get() + 1);
        self.matrix.spmv(v)
    }

    pub fn matrix(&self) -> &'a SparseSpdMatrix {
        self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_examples() {
        let id = SparseSpdMatrix::identity(3);
        let b = [1.0, -2.0, 0.5];
        assert_eq!(energy(&id, &b, &b), -0.5 * dot(&b, &b));
        assert_eq!(energy(&id, &b, &[0.0; 3]), 0.0);

        let kappa = 8.0;
        let d = SparseSpdMatrix::from_diagonal(&[1.0, kappa]).unwrap();
        let e = energy(&d, &[1.0, 1.0], &[1.0, 1.0 / kappa]);
        assert!((e + 0.5 * (1.0 + 1.0 / kappa)).abs() < 1e-15);
    }

    #[test]
    fn compensated_energy_agrees_with_plain() {
        let d = SparseSpdMatrix::from_diagonal(&[1.0, 3.0, 7.0]).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = [0.3, -0.1, 0.45];
        let plain = energy(&d, &b, &x);
        let comp = energy_compensated(&d, &b, &x);
        assert!((plain - comp).abs() <= 1e-15 * plain.abs());
    }

    #[test]
    fn compensated_energy_resolves_tiny_steps() {
        // f(x* + t e) - f(x*) = t^2/2 for the identity, a few ulps of f here
        let n = 50;
        let a = SparseSpdMatrix::identity(n);
        let b: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let mut x = b.clone();
        x[3] += 1e-5;
        let near = energy_compensated(&a, &b, &x);
        let exact = energy_compensated(&a, &b, &b);
        assert!(near > exact);
    }

    #[test]
    fn counting_operator_counts() {
        let a = SparseSpdMatrix::identity(2);
        let op = CountingOperator::new(&a);
        op.apply(&[1.0, 1.0]);
        op.apply(&[1.0, 1.0]);
        assert_eq!(op.count(), 2);
    }
}
