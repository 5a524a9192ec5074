//! Dense vector kernels on `f64` slices.
//!
//! All reductions accumulate strictly left to right so that results are
//! reproducible bit for bit across runs and builds.

/// Euclidean inner product.
pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "dot: length mismatch");
    u.iter().zip(v).fold(0.0, |acc, (a, b)| acc + a * b)
}

/// Returns `v + s*u`.
pub fn axpy(s: f64, u: &[f64], v: &[f64]) -> Vec<f64> {
    assert_eq!(u.len(), v.len(), "axpy: length mismatch");
    u.iter().zip(v).map(|(a, b)| b + s * a).collect()
}

/// In-place `v += s*u`.
pub fn axpy_in_place(s: f64, u: &[f64], v: &mut [f64]) {
    assert_eq!(u.len(), v.len(), "axpy: length mismatch");
    for (b, a) in v.iter_mut().zip(u) {
        *b += s * a;
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn scale(s: f64, v: &[f64]) -> Vec<f64> {
    v.iter().map(|a| s * a).collect()
}

/// Returns `u - v`.
pub fn sub(u: &[f64], v: &[f64]) -> Vec<f64> {
    assert_eq!(u.len(), v.len(), "sub: length mismatch");
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|a| a.is_finite())
}

/// Linear combination `sum_k coeffs[k] * vectors[k]`, accumulated in list order.
pub fn combine(coeffs: &[f64], vectors: &[&[f64]]) -> Vec<f64> {
    assert_eq!(coeffs.len(), vectors.len(), "combine: coefficient count mismatch");
    assert!(!vectors.is_empty(), "combine: empty vector list");
    let n = vectors[0].len();
    let mut out = vec![0.0; n];
    for (&c, v) in coeffs.iter().zip(vectors) {
        assert_eq!(v.len(), n, "combine: length mismatch");
        if c != 0.0 {
            axpy_in_place(c, v, &mut out);
        }
    }
    out
}

/// `max_i |u_i - v_i| / max_i |v_i|` (absolute when `v` is zero).
pub fn rel_diff_inf(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "rel_diff_inf: length mismatch");
    let num = u.iter().zip(v).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let den = v.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// `||u - v||_2 / ||v||_2` (absolute when `v` is zero).
pub fn rel_diff2(u: &[f64], v: &[f64]) -> f64 {
    let den = norm2(v);
    let num = norm2(&sub(u, v));
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_kernels() {
        assert_eq!(dot(&[1.0, 2.0], &[3.0, 4.0]), 11.0);
        assert_eq!(axpy(2.0, &[1.0, 0.0], &[0.0, 1.0]), vec![2.0, 1.0]);
        assert_eq!(norm2(&[3.0, 4.0]), 5.0);
    }

    #[test]
    #[should_panic(expected = "length mismatch")]
    fn dot_rejects_mismatch() {
        dot(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn combine_skips_zero_coefficients() {
        let a = [1.0, 2.0];
        let b = [f64::MAX, f64::MAX];
        assert_eq!(combine(&[2.0, 0.0], &[&a, &b]), vec![2.0, 4.0]);
    }
}
