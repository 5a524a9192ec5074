//! Benchmark problems: synthetic spectra, a 3-D Laplacian, the elastic
//! cube, Matrix Market files, and condition estimates.
//!
//! Problems are named by short specs, for example
//!
//! ```text
//! diagonal:1,1e4
//! logdiag:n=500,kappa=1e10
//! laplacian3d:20
//! random:n=100,kappa=1e4
//! fem-cube:ne=10,spring=1e-10
//! mtx:A.mtx,rhs=b.mtx
//! ```

pub mod fem;
pub mod generators;
pub mod lanczos;
pub mod mtx;

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

pub use fem::{gen_fem_cube, FemCubeSpec};
pub use generators::{gen_diagonal, gen_laplacian3d, log_spectrum, random_spd, random_vector};
pub use lanczos::{estimate_condition, ConditionEstimate};
pub use mtx::{load_matrix_market, read_matrix_market, read_rhs, write_matrix_market, write_rhs};

use crate::error::Result;
use crate::linalg::SparseSpdMatrix;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    /// Right-hand side from `rhs`, or `A * ones` without one.
    MtxFile { path: PathBuf, rhs: Option<PathBuf> },
    Diagonal(Vec<f64>),
    /// `n` log-spaced eigenvalues from 1 to `kappa`.
    LogDiagonal { n: usize, kappa: f64 },
    Laplacian3d { g: usize },
    /// `seed` overrides the caller's seed when given.
    Random { n: usize, kappa: f64, seed: Option<u64> },
    FemCube(FemCubeSpec),
}

/// A system ready to solve.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub a: SparseSpdMatrix,
    pub b: Vec<f64>,
}

impl ProblemSpec {
    /// Builds the system. `seed` drives random matrices and right-hand sides.
    pub fn build(&self, seed: u64) -> Result<Problem> {
        let name = self.to_string();
        let ones_rhs = |a: &SparseSpdMatrix| vec![1.0; a.n()];
        let (a, b) = match self {
            ProblemSpec::MtxFile { path, rhs } => {
                let (a, b) = load_matrix_market(path, rhs.as_deref())?;
                let b = b.unwrap_or_else(|| a.spmv(&vec![1.0; a.n()]));
                (a, b)
            }
            ProblemSpec::Diagonal(spec) => {
                let a = gen_diagonal(spec)?;
                let b = ones_rhs(&a);
                (a, b)
            }
            ProblemSpec::LogDiagonal { n, kappa } => {
                let a = gen_diagonal(&log_spectrum(*n, *kappa))?;
                let b = ones_rhs(&a);
                (a, b)
            }
            ProblemSpec::Laplacian3d { g } => {
                let a = gen_laplacian3d(*g)?;
                let b = ones_rhs(&a);
                (a, b)
            }
            ProblemSpec::Random { n, kappa, seed: own } => {
                let s = own.unwrap_or(seed);
                let a = random_spd(*n, *kappa, s)?;
                let b = random_vector(*n, s.wrapping_add(1));
                (a, b)
            }
            ProblemSpec::FemCube(spec) => gen_fem_cube(spec)?,
        };
        Ok(Problem { name, a, b })
    }
}

fn parse_params(body: &str) -> std::result::Result<HashMap<String, String>, String> {
    let mut map = HashMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, found '{part}'"))?;
        map.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
    }
    Ok(map)
}

fn take<T: FromStr>(map: &mut HashMap<String, String>, keys: &[&str]) -> std::result::Result<Option<T>, String> {
    for k in keys {
        if let Some(v) = map.remove(*k) {
            return v.parse().map(Some).map_err(|_| format!("bad value '{v}' for '{k}'"));
        }
    }
    Ok(None)
}

fn reject_leftovers(map: &HashMap<String, String>) -> std::result::Result<(), String> {
    match map.keys().next() {
        Some(k) => Err(format!("unknown parameter '{k}'")),
        None => Ok(()),
    }
}

impl FromStr for ProblemSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "mtx" => {
                let mut parts = body.split(',');
                let path = parts.next().map(str::trim).filter(|p| !p.is_empty()).ok_or("mtx needs a path")?;
                let mut rhs = None;
                for extra in parts {
                    match extra.trim().split_once('=') {
                        Some(("rhs", p)) => rhs = Some(PathBuf::from(p.trim())),
                        _ => return Err(format!("unknown mtx option '{extra}'")),
                    }
                }
                Ok(ProblemSpec::MtxFile { path: PathBuf::from(path), rhs })
            }
            "diagonal" => {
                let values = body
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| format!("bad spectrum entry '{v}'")))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                if values.iter().any(|v| !(*v > 0.0)) {
                    return Err("spectrum entries must be positive".into());
                }
                Ok(ProblemSpec::Diagonal(values))
            }
            "logdiag" => {
                let mut m = parse_params(body)?;
                let n = take(&mut m, &["n"])?.ok_or("logdiag needs n")?;
                let kappa = take(&mut m, &["kappa"])?.ok_or("logdiag needs kappa")?;
                reject_leftovers(&m)?;
                Ok(ProblemSpec::LogDiagonal { n, kappa })
            }
            "laplacian3d" => {
                let g = match body.trim().strip_prefix("g=") {
                    Some(v) => v.parse(),
                    None => body.trim().parse(),
                }
                .map_err(|_| format!("bad grid size '{body}'"))?;
                Ok(ProblemSpec::Laplacian3d { g })
            }
            "random" => {
                let mut m = parse_params(body)?;
                let n = take(&mut m, &["n"])?.ok_or("random needs n")?;
                let kappa = take(&mut m, &["kappa"])?.unwrap_or(1e4);
                let seed = take(&mut m, &["seed"])?;
                reject_leftovers(&m)?;
                Ok(ProblemSpec::Random { n, kappa, seed })
            }
            "fem-cube" => {
                let mut m = parse_params(body)?;
                let d = FemCubeSpec::default();
                let spec = FemCubeSpec {
                    elements_per_edge: take(&mut m, &["ne"])?.unwrap_or(d.elements_per_edge),
                    spring_scale: take(&mut m, &["spring", "spring_scale"])?.unwrap_or(d.spring_scale),
                    youngs_modulus: take(&mut m, &["e", "youngs_modulus"])?.unwrap_or(d.youngs_modulus),
                    poisson_ratio: take(&mut m, &["nu", "poisson_ratio"])?.unwrap_or(d.poisson_ratio),
                    load_magnitude: take(&mut m, &["load"])?.unwrap_or(d.load_magnitude),
                };
                reject_leftovers(&m)?;
                spec.validate().map_err(|e| e.to_string())?;
                Ok(ProblemSpec::FemCube(spec))
            }
            other => Err(format!("unknown problem kind '{other}'")),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::MtxFile { path, rhs: None } => write!(f, "mtx:{}", path.display()),
            ProblemSpec::MtxFile { path, rhs: Some(r) } => write!(f, "mtx:{},rhs={}", path.display(), r.display()),
            ProblemSpec::Diagonal(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "diagonal:{}", parts.join(","))
            }
            ProblemSpec::LogDiagonal { n, kappa } => write!(f, "logdiag:n={n},kappa={kappa:e}"),
            ProblemSpec::Laplacian3d { g } => write!(f, "laplacian3d:{g}"),
            ProblemSpec::Random { n, kappa, seed: None } => write!(f, "random:n={n},kappa={kappa:e}"),
            ProblemSpec::Random { n, kappa, seed: Some(s) } => write!(f, "random:n={n},kappa={kappa:e},seed={s}"),
            ProblemSpec::FemCube(s) => write!(
                f,
                "fem-cube:ne={},spring={:e},e={:e},nu={},load={:e}",
                s.elements_per_edge, s.spring_scale, s.youngs_modulus, s.poisson_ratio, s.load_magnitude
            ),
        }
    }
}
