//! IRM-CG: the Ritz step restricted to the plane spanned by the current
//! residual and the previous increment.
//!
//! The basic variant recomputes the residual and both products each step
//! (three products). The fast variant keeps `beta = A p` by recursion,
//! updates the residual as `r - w*beta` and needs only `alpha = A r`; every
//! `i_max` steps it recomputes `r` and `beta` from scratch.

use crate::engine::{self, drive, SolveConfig, SolveOutcome, SolverState};
use crate::error::{IrmError, Result};
use crate::linalg::{self, CountingOperator, SparseSpdMatrix};
use crate::reduced::{self, SubspaceBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrmCgVariant {
    Basic,
    Fast,
}

impl IrmCgVariant {
    pub fn label(self) -> &'static str {
        match self {
            IrmCgVariant::Basic => "irm-cg-basic",
            IrmCgVariant::Fast => "irm-cg-fast",
        }
    }
}

/// Applies `x += w p` and, when `recursive` is set, `r -= w beta`.
/// Returns the predicted energy change of the move.
pub fn relaxed_update(state: &mut SolverState, omega: f64, recursive: bool) -> Result<f64> {
    let delta = engine::track_decrement(state, omega);
    linalg::axpy_in_place(omega, &state.p, &mut state.x);
    if recursive {
        let beta = state.beta.as_ref().ok_or(IrmError::MissingCache("beta"))?;
        linalg::axpy_in_place(-omega, beta, &mut state.r);
    }
    Ok(delta.unwrap_or(0.0))
}

/// Recomputes `r = b - A x` and `beta = A p` on steps that are multiples of
/// `i_max` (1-based). Leaves `x` untouched. Returns whether it fired.
pub fn maybe_refresh(op: &CountingOperator, b: &[f64], state: &mut SolverState, step: usize, i_max: usize) -> bool {
    if step.is_multiple_of(i_max) {
        engine::refresh(op, b, state);
        true
    } else {
        false
    }
}

/// Solves the plane problem given the basis vectors and their products and
/// installs the minimiser as the next increment.
///
/// The right-hand side is `[r'r, p'r]`. The second entry is zero in exact
/// arithmetic after an unrelaxed step, but it is computed rather than
/// assumed: once the recursions drift, dropping it turns the step into a
/// non-minimising one and the iteration can diverge.
fn plane_solve(state: &mut SolverState, vectors: Vec<Vec<f64>>, products: Vec<Vec<f64>>, pivot_tol: f64) -> Result<usize> {
    let basis = SubspaceBasis::new(vectors);
    let rs = reduced::assemble_from_products(&basis, &products, &state.r);
    let sol = reduced::solve(&rs, pivot_tol)?;
    state.p = linalg::combine(&sol.coeffs, &basis.as_slices());
    let prods: Vec<&[f64]> = products.iter().map(Vec::as_slice).collect();
    state.beta = Some(linalg::combine(&sol.coeffs, &prods));
    state.alpha = Some(products.into_iter().next().expect("non-empty basis"));
    state.direction = None;
    Ok(sol.kept.len())
}

fn residual_is_zero(state: &SolverState) -> bool {
    state.r.iter().all(|&v| v == 0.0)
}

/// Plane basis for the next step: `[r, p]`, or `[r]` when the stall guard
/// fires or the increment is zero.
fn plane_vectors(state: &mut SolverState) -> Vec<Vec<f64>> {
    let forced = engine::take_forced_sd(state);
    if forced || state.p.iter().all(|&v| v == 0.0) {
        vec![state.r.clone()]
    } else {
        vec![state.r.clone(), state.p.clone()]
    }
}

/// One basic step: explicit residual, then `A r` and `A p` for the plane.
pub fn irm_cg_step_basic(op: &CountingOperator, b: &[f64], state: &mut SolverState, config: &SolveConfig) -> Result<usize> {
    let omega = config.omega.at(state.iter + 1);
    relaxed_update(state, omega, false)?;
    state.r = linalg::sub(b, &op.apply(&state.x));
    state.iter += 1;
    if residual_is_zero(state) {
        engine::set_zero_increment(state);
        return Ok(0);
    }
    let vectors = plane_vectors(state);
    let products: Vec<Vec<f64>> = vectors.iter().map(|v| op.apply(v)).collect();
    plane_solve(state, vectors, products, config.pivot_tol)
}

/// One fast step: recursive residual, `alpha = A r` as the only product,
/// `beta` carried forward as `[alpha beta] a`.
pub fn irm_cg_step_fast(op: &CountingOperator, b: &[f64], state: &mut SolverState, config: &SolveConfig) -> Result<usize> {
    if state.beta.is_none() {
        return Err(IrmError::MissingCache("beta"));
    }
    let step = state.iter + 1;
    let omega = config.omega.at(step);
    relaxed_update(state, omega, false)?;
    if !maybe_refresh(op, b, state, step, config.i_max) {
        let beta = state.beta.as_ref().expect("checked above");
        linalg::axpy_in_place(-omega, beta, &mut state.r);
    }
    state.iter = step;
    if residual_is_zero(state) {
        engine::set_zero_increment(state);
        return Ok(0);
    }
    let alpha = op.apply(&state.r);
    let vectors = plane_vectors(state);
    let mut products = vec![alpha];
    if vectors.len() == 2 {
        products.push(state.beta.take().expect("checked above"));
    }
    plane_solve(state, vectors, products, config.pivot_tol)
}

pub fn irm_cg_solve(
    a: &SparseSpdMatrix,
    b: &[f64],
    x0: &[f64],
    config: &SolveConfig,
    variant: IrmCgVariant,
) -> Result<SolveOutcome> {
    drive(a, b, x0, config, variant.label(), |op, state| match variant {
        IrmCgVariant::Basic => irm_cg_step_basic(op, b, state, config),
        IrmCgVariant::Fast => irm_cg_step_fast(op, b, state, config),
    })
}
