//! Classic conjugate gradients (Fletcher-Reeves), started from the same
//! steepest-descent increment as the Ritz solvers.
//!
//! The step is written over the shared [`SolverState`]: the pending
//! increment is `p = a*d` and `beta = A p`, so CG and IRM-CG steps can be
//! interleaved freely. When a CG step follows a Ritz step the search
//! direction is rebuilt from `p` using `r'd = r'r`.

use crate::engine::{drive, CgDirection, SolveConfig, SolveOutcome, SolverState};
use crate::error::{IrmError, Result};
use crate::irm_cg::irm_cg_step_basic;
use crate::linalg::{self, dot, CountingOperator, SparseSpdMatrix};

/// One CG step. With `restart` set the new direction is the residual.
pub fn cg_step(state: &mut SolverState, op: &CountingOperator, restart: bool) -> Result<usize> {
    let beta = state.beta.take().ok_or(IrmError::MissingCache("beta"))?;
    let prev = match state.direction.take() {
        Some(dir) => dir,
        None => {
            let rr = dot(&state.r, &state.r);
            let rp = dot(&state.r, &state.p);
            if rp == 0.0 {
                return Err(IrmError::DegenerateBasis);
            }
            CgDirection {
                d: linalg::scale(rr / rp, &state.p),
                rr,
            }
        }
    };
    linalg::axpy_in_place(1.0, &state.p, &mut state.x);
    linalg::axpy_in_place(-1.0, &beta, &mut state.r);
    state.iter += 1;

    let rr = dot(&state.r, &state.r);
    let d = if restart {
        state.r.clone()
    } else {
        linalg::axpy(rr / prev.rr, &prev.d, &state.r)
    };
    let ad = op.apply(&d);
    let dad = dot(&d, &ad);
    if !(dad > 0.0) {
        if rr == 0.0 {
            crate::engine::set_zero_increment(state);
            return Ok(0);
        }
        return Err(IrmError::NotPositiveDefinite(format!("d'Ad = {dad:e}")));
    }
    let step = rr / dad;
    state.p = linalg::scale(step, &d);
    state.beta = Some(linalg::scale(step, &ad));
    state.alpha = None;
    state.direction = Some(CgDirection { d, rr });
    Ok(1)
}

/// CG with an optional restart every `restart_period` steps.
pub fn cg_solve(
    a: &SparseSpdMatrix,
    b: &[f64],
    x0: &[f64],
    config: &SolveConfig,
    restart_period: Option<usize>,
) -> Result<SolveOutcome> {
    if restart_period == Some(0) {
        return Err(IrmError::InvalidConfig("restart period must be at least 1".into()));
    }
    let label = match restart_period {
        Some(k) => format!("cg-restart:{k}"),
        None => "cg".to_string(),
    };
    drive(a, b, x0, config, &label, |op, state| {
        let restart = restart_period.is_some_and(|k| (state.iter + 1) % k == 0);
        cg_step(state, op, restart)
    })
}

/// CG where every `refresh_every`-th step is replaced by a basic IRM-CG step.
pub fn cg_with_refresh(
    a: &SparseSpdMatrix,
    b: &[f64],
    x0: &[f64],
    config: &SolveConfig,
    refresh_every: usize,
) -> Result<SolveOutcome> {
    if refresh_every == 0 {
        return Err(IrmError::InvalidConfig("refresh period must be at least 1".into()));
    }
    let label = format!("cg-refresh:{refresh_every}");
    drive(a, b, x0, config, &label, |op, state| {
        if (state.iter + 1) % refresh_every == 0 {
            irm_cg_step_basic(op, b, state, config)
        } else {
            cg_step(state, op, false)
        }
    })
}
