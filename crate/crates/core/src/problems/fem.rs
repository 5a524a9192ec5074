//! Linear elastic cube meshed with 8-node hexahedra.
//!
//! The unit cube is split into `ne^3` equal elements and has no boundary
//! conditions other than grounded springs on the three translations of its
//! eight corner nodes. A single downward point load acts on the node at the
//! centre of the top face (`z = 1`); for odd `ne` the node just below and
//! left of the centre is used.

use crate::error::{IrmError, Result};
use crate::linalg::SparseSpdMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FemCubeSpec {
    pub elements_per_edge: usize,
    /// Corner spring stiffness as a multiple of `youngs_modulus / ne`.
    pub spring_scale: f64,
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub load_magnitude: f64,
}

impl Default for FemCubeSpec {
    fn default() -> Self {
        FemCubeSpec {
            elements_per_edge: 10,
            spring_scale: 1.0,
            youngs_modulus: 30e9,
            poisson_ratio: 0.2,
            load_magnitude: 1.0,
        }
    }
}

impl FemCubeSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(IrmError::InvalidConfig(m));
        if self.elements_per_edge == 0 {
            return bad("elements per edge must be at least 1".into());
        }
        if !(self.spring_scale > 0.0 && self.spring_scale.is_finite()) {
            return bad(format!("spring scale must be positive, got {}", self.spring_scale));
        }
        if !(self.youngs_modulus > 0.0 && self.youngs_modulus.is_finite()) {
            return bad(format!("Young's modulus must be positive, got {}", self.youngs_modulus));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return bad(format!("Poisson ratio must lie in [0, 0.5), got {}", self.poisson_ratio));
        }
        if !self.load_magnitude.is_finite() {
            return bad("load magnitude must be finite".into());
        }
        Ok(())
    }

    pub fn dofs(&self) -> usize {
        3 * (self.elements_per_edge + 1).pow(3)
    }

    /// Reference spring stiffness `E * L / ne` for the unit edge `L = 1`.
    pub fn reference_stiffness(&self) -> f64 {
        self.youngs_modulus / self.elements_per_edge as f64
    }
}

/// Local node signs in the usual counter-clockwise bottom, then top order.
const NODE_SIGNS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

fn elasticity_matrix(e: f64, nu: f64) -> [[f64; 6]; 6] {
    let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    let mu = e / (2.0 * (1.0 + nu));
    let mut d = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = lambda;
        }
        d[i][i] = lambda + 2.0 * mu;
        d[i + 3][i + 3] = mu;
    }
    d
}

/// 24x24 stiffness of a cube element with edge `h`, row-major, 2x2x2 Gauss
/// rule, symmetrised exactly.
pub fn hex8_stiffness(h: f64, e: f64, nu: f64) -> Vec<f64> {
    let d = elasticity_matrix(e, nu);
    let g = 1.0 / 3f64.sqrt();
    let det_j = (h / 2.0).powi(3);
    let mut k = vec![0.0; 24 * 24];
    for &gx in &[-g, g] {
        for &gy in &[-g, g] {
            for &gz in &[-g, g] {
                // physical derivatives of the shape functions, dN/dx = (2/h) dN/dxi
                let mut dn = [[0.0; 3]; 8];
                for (a, s) in NODE_SIGNS.iter().enumerate() {
                    let (fx, fy, fz) = (1.0 + s[0] * gx, 1.0 + s[1] * gy, 1.0 + s[2] * gz);
                    dn[a] = [
                        s[0] * fy * fz / 8.0 * 2.0 / h,
                        s[1] * fx * fz / 8.0 * 2.0 / h,
                        s[2] * fx * fy / 8.0 * 2.0 / h,
                    ];
                }
                let mut b = [[0.0; 24]; 6];
                for a in 0..8 {
                    let [bx, by, bz] = dn[a];
                    let c = 3 * a;
                    b[0][c] = bx;
                    b[1][c + 1] = by;
                    b[2][c + 2] = bz;
                    b[3][c] = by;
                    b[3][c + 1] = bx;
                    b[4][c + 1] = bz;
                    b[4][c + 2] = by;
                    b[5][c] = bz;
                    b[5][c + 2] = bx;
                }
                let mut db = [[0.0; 24]; 6];
                for i in 0..6 {
                    for col in 0..24 {
                        db[i][col] = (0..6).map(|l| d[i][l] * b[l][col]).sum();
                    }
                }
                for r in 0..24 {
                    for c in 0..24 {
                        k[r * 24 + c] += det_j * (0..6).map(|l| b[l][r] * db[l][c]).sum::<f64>();
                    }
                }
            }
        }
    }
    for r in 0..24 {
        for c in 0..r {
            let avg = 0.5 * (k[r * 24 + c] + k[c * 24 + r]);
            k[r * 24 + c] = avg;
            k[c * 24 + r] = avg;
        }
    }
    k
}

/// Assembles the cube stiffness and load vector; `n = 3 (ne+1)^3`.
pub fn gen_fem_cube(spec: &FemCubeSpec) -> Result<(SparseSpdMatrix, Vec<f64>)> {
    spec.validate()?;
    let ne = spec.elements_per_edge;
    let np = ne + 1;
    let h = 1.0 / ne as f64;
    let ke = hex8_stiffness(h, spec.youngs_modulus, spec.poisson_ratio);
    let node = |i: usize, j: usize, k: usize| i + np * (j + np * k);

    let mut t = Vec::with_capacity(ne * ne * ne * 24 * 24 + 24);
    for ez in 0..ne {
        for ey in 0..ne {
            for ex in 0..ne {
                let nodes: Vec<usize> = NODE_SIGNS
                    .iter()
                    .map(|s| {
                        let off = |v: f64| usize::from(v > 0.0);
                        node(ex + off(s[0]), ey + off(s[1]), ez + off(s[2]))
                    })
                    .collect();
                for a in 0..8 {
                    for b in 0..8 {
                        for p in 0..3 {
                            for q in 0..3 {
                                let v = ke[(3 * a + p) * 24 + 3 * b + q];
                                if v != 0.0 {
                                    t.push((3 * nodes[a] + p, 3 * nodes[b] + q, v));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let spring = spec.spring_scale * spec.reference_stiffness();
    for &k in &[0, ne] {
        for &j in &[0, ne] {
            for &i in &[0, ne] {
                for p in 0..3 {
                    let dof = 3 * node(i, j, k) + p;
                    t.push((dof, dof, spring));
                }
            }
        }
    }
    let a = SparseSpdMatrix::from_triplets(spec.dofs(), &t)?;
    let mut b = vec![0.0; spec.dofs()];
    b[3 * node(ne / 2, ne / 2, ne) + 2] = -spec.load_magnitude;
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        for (ne, n) in [(1, 24), (2, 81), (10, 3993)] {
            let spec = FemCubeSpec { elements_per_edge: ne, ..FemCubeSpec::default() };
            assert_eq!(spec.dofs(), n);
        }
        let (a, b) = gen_fem_cube(&FemCubeSpec { elements_per_edge: 1, ..FemCubeSpec::default() }).unwrap();
        assert_eq!((a.n(), b.len()), (24, 24));
        assert!(a.spd_probe(100, 11).is_ok());
    }

    #[test]
    fn element_rows_sum_to_zero() {
        // rigid translation produces no force
        let k = hex8_stiffness(0.5, 30e9, 0.2);
        for r in 0..24 {
            for comp in 0..3 {
                let s: f64 = (0..8).map(|a| k[r * 24 + 3 * a + comp]).sum();
                assert!(s.abs() < 1e-6 * k[r * 24 + r]);
            }
        }
    }

    #[test]
    fn rejects_bad_spec() {
        let bad_nu = FemCubeSpec { poisson_ratio: 0.5, ..FemCubeSpec::default() };
        assert!(gen_fem_cube(&bad_nu).is_err());
        let bad_spring = FemCubeSpec { spring_scale: 0.0, ..FemCubeSpec::default() };
        assert!(gen_fem_cube(&bad_spring).is_err());
    }

    #[test]
    fn load_on_top_centre() {
        let spec = FemCubeSpec { elements_per_edge: 2, ..FemCubeSpec::default() };
        let (_, b) = gen_fem_cube(&spec).unwrap();
        // node (1, 1, 2) in a 3x3x3 grid is 1 + 3 + 18 = 22
        assert_eq!(b[3 * 22 + 2], -1.0);
        assert_eq!(b.iter().filter(|v| **v != 0.0).count(), 1);
    }
}
