//! Iterated Ritz method solvers for sparse symmetric positive definite
//! systems `A x = b`.
//!
//! Each step of the method minimises the energy `f(x) = 1/2 x'Ax - x'b`
//! over a small subspace spanned by generated coordinate vectors. With the
//! subspace `{r, p}` it reproduces conjugate gradients step for step while
//! never relying on A-orthogonality of earlier directions.
//!
//! * [`engine`]: the general method with pluggable generators.
//! * [`irm_cg`]: the two-vector specialisation, basic and single-product forms.
//! * [`cg`]: the classic CG baseline.
//! * [`stability`]: the two-by-two disturbance experiment.
//! * [`problems`]: matrix generators, Matrix Market I/O and condition estimates.

pub mod cg;
pub mod engine;
pub mod error;
pub mod irm_cg;
pub mod linalg;
pub mod problems;
pub mod reduced;
pub mod solver;
pub mod stability;
pub mod trace;

pub use engine::{GeneratorSpec, Relaxation, SolveConfig, SolveOutcome, SolverState, TraceLevel};
pub use error::{IrmError, Result};
pub use irm_cg::IrmCgVariant;
pub use linalg::SparseSpdMatrix;
pub use solver::Method;
pub use trace::{ConvergenceTrace, Status, TraceFormat};
