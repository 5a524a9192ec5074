//! The general Iterated Ritz Method.
//!
//! Each step applies the pending increment, recomputes the residual
//! explicitly, builds a small subspace from a list of generators and takes
//! the energy minimiser within it as the next increment. The loop is shared
//! by every solver in the crate through [`drive`].

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{IrmError, Result};
use crate::linalg::{self, all_finite, dot, norm2, CountingOperator, SparseSpdMatrix};
use crate::reduced::{self, SubspaceBasis};
use crate::trace::{ConvergenceTrace, Status, StepRecord};

/// Consecutive non-decreasing steps after which a pure steepest-descent step is forced.
pub const STALL_LIMIT: usize = 3;

/// Relaxation factor per step; the last schedule entry repeats.
#[derive(Debug, Clone, PartialEq)]
pub enum Relaxation {
    Constant(f64),
    Schedule(Vec<f64>),
}

impl Relaxation {
    /// Factor for 1-based step `step`.
    pub fn at(&self, step: usize) -> f64 {
        match self {
            Relaxation::Constant(w) => *w,
            Relaxation::Schedule(ws) => ws[step.saturating_sub(1).min(ws.len() - 1)],
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            Relaxation::Constant(w) => std::slice::from_ref(w),
            Relaxation::Schedule(ws) => ws,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceLevel {
    /// Residual norms only.
    Light,
    /// Also the energy of every iterate (one uncounted product per step).
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub eps: f64,
    pub n_max: usize,
    pub i_max: usize,
    pub omega: Relaxation,
    pub pivot_tol: f64,
    pub m_max: usize,
    pub trace_level: TraceLevel,
    pub record_wall_clock: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            eps: 1e-10,
            n_max: 10_000,
            i_max: 50,
            omega: Relaxation::Constant(1.0),
            pivot_tol: 1e-12,
            m_max: 8,
            trace_level: TraceLevel::Light,
            record_wall_clock: true,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(IrmError::InvalidConfig(msg));
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if self.n_max == 0 {
            return bad("n_max must be at least 1".into());
        }
        if self.i_max == 0 {
            return bad("i_max must be at least 1".into());
        }
        if self.m_max == 0 {
            return bad("m_max must be at least 1".into());
        }
        if !(self.pivot_tol > 0.0) {
            return bad(format!("pivot_tol must be positive, got {}", self.pivot_tol));
        }
        let ws = self.omega.values();
        if ws.is_empty() {
            return bad("relaxation schedule is empty".into());
        }
        if let Some(w) = ws.iter().find(|w| !(**w > 0.0 && **w < 2.0)) {
            return bad(format!("relaxation factor {w} outside (0, 2)"));
        }
        Ok(())
    }
}

/// One source of coordinate vectors for the search subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorSpec {
    /// The residual `r_(i+1)`.
    CurrentResidual,
    /// The increment `p_(i)` just applied.
    PreviousIncrement,
    /// `diag(A)^-1 r`.
    Jacobi,
    /// One forward SOR sweep, `(D/w + L)^-1 r`.
    SorForward { omega: f64 },
    /// One backward SOR sweep, `(D/w + U)^-1 r`.
    SorBackward { omega: f64 },
    /// `s*r`.
    ScaledResidual { scale: f64 },
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSpec::CurrentResidual => write!(f, "r"),
            GeneratorSpec::PreviousIncrement => write!(f, "p"),
            GeneratorSpec::Jacobi => write!(f, "jacobi"),
            GeneratorSpec::SorForward { omega } if *omega == 1.0 => write!(f, "sor-forward"),
            GeneratorSpec::SorForward { omega } => write!(f, "sor-forward:{omega}"),
            GeneratorSpec::SorBackward { omega } if *omega == 1.0 => write!(f, "sor-backward"),
            GeneratorSpec::SorBackward { omega } => write!(f, "sor-backward:{omega}"),
            GeneratorSpec::ScaledResidual { scale } => write!(f, "scaled:{scale}"),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |default: Option<f64>| -> std::result::Result<f64, String> {
            match (arg, default) {
                (Some(a), _) => a.parse().map_err(|_| format!("bad parameter '{a}' for generator '{kind}'")),
                (None, Some(d)) => Ok(d),
                (None, None) => Err(format!("generator '{kind}' needs a parameter")),
            }
        };
        let spec = match kind {
            "r" | "residual" | "current-residual" => GeneratorSpec::CurrentResidual,
            "p" | "increment" | "previous-increment" => GeneratorSpec::PreviousIncrement,
            "jacobi" => GeneratorSpec::Jacobi,
            "sor-forward" => GeneratorSpec::SorForward { omega: num(Some(1.0))? },
            "sor-backward" => GeneratorSpec::SorBackward { omega: num(Some(1.0))? },
            "scaled" | "scaled-residual" => GeneratorSpec::ScaledResidual { scale: num(None)? },
            other => return Err(format!("unknown generator '{other}'")),
        };
        match spec {
            GeneratorSpec::SorForward { omega } | GeneratorSpec::SorBackward { omega }
                if !(omega > 0.0 && omega < 2.0) =>
            {
                Err(format!("SOR factor {omega} outside (0, 2)"))
            }
            _ => Ok(spec),
        }
    }
}

/// Search direction of a classic CG step, kept so consecutive CG steps
/// follow the textbook recurrence exactly.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CgDirection {
    pub d: Vec<f64>,
    pub rr: f64,
}

/// Iterate, residual, pending increment and cached products of one solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    /// Increment applied by the next step.
    pub p: Vec<f64>,
    /// `A*r` from the last step, when the method keeps it.
    pub alpha: Option<Vec<f64>>,
    /// `A*p`.
    pub beta: Option<Vec<f64>>,
    pub iter: usize,
    pub r0_norm: f64,
    pub refreshes: u64,
    pub(crate) direction: Option<CgDirection>,
    pub(crate) stalls: usize,
}

impl SolverState {
    pub fn rel_residual(&self) -> f64 {
        if self.r0_norm == 0.0 {
            0.0
        } else {
            norm2(&self.r) / self.r0_norm
        }
    }

    /// True when the starting guess already solves the system exactly.
    pub fn is_trivially_converged(&self) -> bool {
        self.r0_norm == 0.0
    }
}

/// Steepest-descent start: `r0 = b - A x0`, `p0 = (r0'r0 / r0'A r0) r0`,
/// `beta0 = A p0` (obtained by scaling `A r0`, so two products in total).
pub fn init_steepest_descent(op: &CountingOperator, b: &[f64], x0: &[f64]) -> Result<SolverState> {
    let n = op.n();
    assert_eq!(b.len(), n, "init: dimension mismatch");
    assert_eq!(x0.len(), n, "init: dimension mismatch");
    let r0 = linalg::sub(b, &op.apply(x0));
    let rr = dot(&r0, &r0);
    let r0_norm = rr.sqrt();
    let mut state = SolverState {
        x: x0.to_vec(),
        r: r0,
        p: vec![0.0; n],
        alpha: None,
        beta: Some(vec![0.0; n]),
        iter: 0,
        r0_norm,
        refreshes: 0,
        direction: None,
        stalls: 0,
    };
    if rr == 0.0 {
        return Ok(state);
    }
    let ar = op.apply(&state.r);
    let rar = dot(&state.r, &ar);
    if !(rar > 0.0) {
        return Err(IrmError::NotPositiveDefinite(format!("r0'A r0 = {rar:e}")));
    }
    let q = rr / rar;
    state.p = linalg::scale(q, &state.r);
    state.beta = Some(linalg::scale(q, &ar));
    state.direction = Some(CgDirection {
        d: state.r.clone(),
        rr,
    });
    Ok(state)
}

fn jacobi(a: &SparseSpdMatrix, r: &[f64]) -> Vec<f64> {
    r.iter().zip(a.diagonal()).map(|(ri, d)| ri / d).collect()
}

fn sor_forward(a: &SparseSpdMatrix, r: &[f64], omega: f64) -> Vec<f64> {
    let n = a.n();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let (cols, vals) = a.row(i);
        let mut s = r[i];
        let mut diag = 0.0;
        for (&j, &v) in cols.iter().zip(vals) {
            if j < i {
                s -= v * y[j];
            } else if j == i {
                diag = v;
            }
        }
        y[i] = s * omega / diag;
    }
    y
}

fn sor_backward(a: &SparseSpdMatrix, r: &[f64], omega: f64) -> Vec<f64> {
    let n = a.n();
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let (cols, vals) = a.row(i);
        let mut s = r[i];
        let mut diag = 0.0;
        for (&j, &v) in cols.iter().zip(vals).rev() {
            if j > i {
                s -= v * y[j];
            } else if j == i {
                diag = v;
            }
        }
        y[i] = s * omega / diag;
    }
    y
}

/// Builds the coordinate vectors for one step, in `specs` order. Zero
/// vectors are left out.
pub fn generate_subspace(state: &SolverState, specs: &[GeneratorSpec], a: &SparseSpdMatrix) -> Result<SubspaceBasis> {
    let mut vectors = Vec::with_capacity(specs.len());
    for spec in specs {
        let v = match *spec {
            GeneratorSpec::CurrentResidual => state.r.clone(),
            GeneratorSpec::PreviousIncrement => state.p.clone(),
            GeneratorSpec::Jacobi => jacobi(a, &state.r),
            GeneratorSpec::SorForward { omega } => sor_forward(a, &state.r, omega),
            GeneratorSpec::SorBackward { omega } => sor_backward(a, &state.r, omega),
            GeneratorSpec::ScaledResidual { scale } => linalg::scale(scale, &state.r),
        };
        if v.iter().any(|&c| c != 0.0) {
            vectors.push(v);
        }
    }
    if vectors.is_empty() {
        return Err(IrmError::DegenerateBasis);
    }
    Ok(SubspaceBasis::new(vectors))
}

/// Energy change `f(x + w p) - f(x) = w^2/2 p'Ap - w p'r`, from the cached
/// `beta = A p`. Updates the stall counter. Call before the iterate moves.
pub(crate) fn track_decrement(state: &mut SolverState, omega: f64) -> Option<f64> {
    let beta = state.beta.as_ref()?;
    let delta = 0.5 * omega * omega * dot(&state.p, beta) - omega * dot(&state.p, &state.r);
    if delta >= 0.0 {
        state.stalls += 1;
    } else {
        state.stalls = 0;
    }
    Some(delta)
}

/// True when the stall guard asks for a steepest-descent step; resets it.
pub(crate) fn take_forced_sd(state: &mut SolverState) -> bool {
    if state.stalls >= STALL_LIMIT {
        state.stalls = 0;
        true
    } else {
        false
    }
}

/// Recomputes `r = b - A x` and, when cached, `beta = A p`.
pub fn refresh(op: &CountingOperator, b: &[f64], state: &mut SolverState) {
    state.r = linalg::sub(b, &op.apply(&state.x));
    if state.beta.is_some() {
        state.beta = Some(op.apply(&state.p));
    }
    if let Some(dir) = state.direction.as_mut() {
        dir.rr = dot(&state.r, &state.r);
    }
    state.refreshes += 1;
}

pub(crate) fn set_zero_increment(state: &mut SolverState) {
    let n = state.x.len();
    state.p = vec![0.0; n];
    state.beta = Some(vec![0.0; n]);
    state.alpha = Some(vec![0.0; n]);
    state.direction = None;
}

/// Minimises the energy over `span(basis)` from the current residual and
/// stores the minimiser as the next increment. One product per vector.
/// Returns the number of vectors kept after pivot dropping.
pub fn ritz_update(op: &CountingOperator, state: &mut SolverState, basis: &SubspaceBasis, pivot_tol: f64) -> Result<usize> {
    let products: Vec<Vec<f64>> = basis.vectors().iter().map(|v| op.apply(v)).collect();
    let rs = reduced::assemble_from_products(basis, &products, &state.r);
    let sol = reduced::solve(&rs, pivot_tol)?;
    let phi = basis.as_slices();
    state.p = linalg::combine(&sol.coeffs, &phi);
    let ap: Vec<&[f64]> = products.iter().map(Vec::as_slice).collect();
    state.beta = Some(linalg::combine(&sol.coeffs, &ap));
    state.alpha = None;
    state.direction = None;
    Ok(sol.kept.len())
}

/// One step of the general method: `x += w p`, `r = b - A x`, then a Ritz
/// solve over the generated subspace.
pub fn irm_step(
    op: &CountingOperator,
    b: &[f64],
    state: &mut SolverState,
    specs: &[GeneratorSpec],
    config: &SolveConfig,
) -> Result<usize> {
    let omega = config.omega.at(state.iter + 1);
    track_decrement(state, omega);
    linalg::axpy_in_place(omega, &state.p.clone(), &mut state.x);
    state.r = linalg::sub(b, &op.apply(&state.x));
    state.iter += 1;
    if state.r.iter().all(|&v| v == 0.0) {
        set_zero_increment(state);
        return Ok(0);
    }
    let basis = if take_forced_sd(state) {
        generate_subspace(state, &[GeneratorSpec::CurrentResidual], op.matrix())?
    } else {
        generate_subspace(state, specs, op.matrix())?
    };
    ritz_update(op, state, &basis, config.pivot_tol)
}

/// Result of a solve: the final iterate and its trace.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub x: Vec<f64>,
    pub trace: ConvergenceTrace,
}

impl SolveOutcome {
    pub fn iterations(&self) -> usize {
        self.trace.iterations()
    }

    pub fn is_converged(&self) -> bool {
        self.trace.is_converged()
    }

    pub fn status(&self) -> &Status {
        &self.trace.status
    }
}

fn check_inputs(a: &SparseSpdMatrix, b: &[f64], x0: &[f64]) -> Result<()> {
    if b.len() != a.n() || x0.len() != a.n() {
        return Err(IrmError::InvalidConfig(format!(
            "dimension mismatch: A is {n}x{n}, b has {}, x0 has {}",
            b.len(),
            x0.len(),
            n = a.n()
        )));
    }
    if !all_finite(b) || !all_finite(x0) {
        return Err(IrmError::InvalidConfig("b and x0 must be finite".into()));
    }
    Ok(())
}

/// Shared iteration loop.
///
/// Stops when the tracked residual satisfies `||r|| <= eps ||r0||` or after
/// `n_max` steps. Before reporting convergence the residual is recomputed as
/// `b - A x`; if that check fails the state is refreshed and iteration
/// continues. Errors raised by a step end the solve with an error status.
pub(crate) fn drive<F>(
    a: &SparseSpdMatrix,
    b: &[f64],
    x0: &[f64],
    config: &SolveConfig,
    label: &str,
    mut step: F,
) -> Result<SolveOutcome>
where
    F: FnMut(&CountingOperator, &mut SolverState) -> Result<usize>,
{
    config.validate()?;
    check_inputs(a, b, x0)?;
    let op = CountingOperator::new(a);
    let start = Instant::now();
    let mut trace = ConvergenceTrace::new(label);
    let mut state = init_steepest_descent(&op, b, x0)?;

    let record = |state: &SolverState, basis_size: usize, spmv: u64| StepRecord {
        iter: state.iter,
        abs_residual: norm2(&state.r),
        rel_residual: if state.iter == 0 { 1.0 } else { state.rel_residual() },
        energy: match config.trace_level {
            TraceLevel::Full => Some(linalg::energy_compensated(a, b, &state.x)),
            TraceLevel::Light => None,
        },
        basis_size,
        spmv,
        wall_nanos: if config.record_wall_clock {
            start.elapsed().as_nanos() as u64
        } else {
            0
        },
    };
    trace.records.push(record(&state, 0, op.count()));

    if state.is_trivially_converged() {
        trace.status = Status::Converged;
        trace.final_rel_residual = 0.0;
        return Ok(SolveOutcome { x: state.x, trace });
    }

    loop {
        if state.rel_residual() <= config.eps || state.iter >= config.n_max {
            let r_true = linalg::sub(b, &a.spmv(&state.x));
            let final_rel = norm2(&r_true) / state.r0_norm;
            trace.final_rel_residual = final_rel;
            if final_rel <= config.eps {
                trace.status = Status::Converged;
                break;
            }
            if state.iter >= config.n_max {
                trace.status = Status::MaxIterations;
                break;
            }
            refresh(&op, b, &mut state);
        }
        match step(&op, &mut state) {
            Ok(kept) => trace.records.push(record(&state, kept, op.count())),
            Err(e) => {
                trace.status = Status::Error(e.to_string());
                trace.final_rel_residual = norm2(&linalg::sub(b, &a.spmv(&state.x))) / state.r0_norm;
                break;
            }
        }
    }
    trace.refreshes = state.refreshes;
    Ok(SolveOutcome { x: state.x, trace })
}

/// General IRM solve with the given subspace generators.
pub fn irm_solve(
    a: &SparseSpdMatrix,
    b: &[f64],
    x0: &[f64],
    specs: &[GeneratorSpec],
    config: &SolveConfig,
) -> Result<SolveOutcome> {
    if specs.is_empty() {
        return Err(IrmError::InvalidConfig("at least one generator is required".into()));
    }
    if specs.len() > config.m_max {
        return Err(IrmError::InvalidConfig(format!(
            "{} generators exceed m_max = {}",
            specs.len(),
            config.m_max
        )));
    }
    let label = format!(
        "irm:{}",
        specs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    );
    drive(a, b, x0, config, &label, |op, state| irm_step(op, b, state, specs, config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> SparseSpdMatrix {
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
    fn config_validation() {
        assert!(SolveConfig::default().validate().is_ok());
        let mut c = SolveConfig::default();
        c.omega = Relaxation::Constant(2.0);
        assert!(c.validate().is_err());
        c.omega = Relaxation::Schedule(vec![1.0, 0.0]);
        assert!(c.validate().is_err());
        c = SolveConfig { eps: 1.0, ..SolveConfig::default() };
        assert!(c.validate().is_err());
        c = SolveConfig { i_max: 0, ..SolveConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn relaxation_schedule_repeats_last() {
        let w = Relaxation::Schedule(vec![0.5, 1.5]);
        assert_eq!((w.at(1), w.at(2), w.at(9)), (0.5, 1.5, 1.5));
    }

    #[test]
    fn generator_parsing() {
        assert_eq!("p".parse::<GeneratorSpec>().unwrap(), GeneratorSpec::PreviousIncrement);
        assert_eq!(
            "sor-forward:1.2".parse::<GeneratorSpec>().unwrap(),
            GeneratorSpec::SorForward { omega: 1.2 }
        );
        assert!("scaled".parse::<GeneratorSpec>().is_err());
        assert!("sor-backward:2.5".parse::<GeneratorSpec>().is_err());
        assert!("ilu".parse::<GeneratorSpec>().is_err());
        for s in ["r", "p", "jacobi", "sor-forward", "sor-backward:0.8", "scaled:2"] {
            let g: GeneratorSpec = s.parse().unwrap();
            assert_eq!(g.to_string().parse::<GeneratorSpec>().unwrap(), g);
        }
    }

    #[test]
    fn init_on_identity_is_exact() {
        let a = SparseSpdMatrix::identity(3);
        let op = CountingOperator::new(&a);
        let b = [1.0, 2.0, -3.0];
        let s = init_steepest_descent(&op, &b, &[0.0; 3]).unwrap();
        assert_eq!(s.p, b.to_vec());
        assert_eq!(op.count(), 2);
    }

    #[test]
    fn init_on_two_by_two() {
        let kappa = 9.0;
        let a = SparseSpdMatrix::from_diagonal(&[1.0, kappa]).unwrap();
        let op = CountingOperator::new(&a);
        let s = init_steepest_descent(&op, &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        let q = 2.0 / (1.0 + kappa);
        assert_eq!(s.p, vec![q, q]);
        assert_eq!(s.beta.unwrap(), a.spmv(&[q, q]));
    }

    #[test]
    fn init_at_solution_signals_convergence() {
        let a = SparseSpdMatrix::from_diagonal(&[2.0, 4.0]).unwrap();
        let op = CountingOperator::new(&a);
        let s = init_steepest_descent(&op, &[2.0, 4.0], &[1.0, 1.0]).unwrap();
        assert!(s.is_trivially_converged());
        let out = irm_solve(&a, &[2.0, 4.0], &[1.0, 1.0], &[GeneratorSpec::CurrentResidual], &SolveConfig::default())
            .unwrap();
        assert!(out.is_converged());
        assert_eq!(out.iterations(), 0);
    }

    fn state_with_residual(r: Vec<f64>) -> SolverState {
        let n = r.len();
        SolverState {
            x: vec![0.0; n],
            r,
            p: vec![0.0; n],
            alpha: None,
            beta: None,
            iter: 0,
            r0_norm: 1.0,
            refreshes: 0,
            direction: None,
            stalls: 0,
        }
    }

    #[test]
    fn jacobi_generator() {
        let kappa = 16.0;
        let a = SparseSpdMatrix::from_diagonal(&[1.0, kappa]).unwrap();
        let s = state_with_residual(vec![1.0, 1.0]);
        let basis = generate_subspace(&s, &[GeneratorSpec::Jacobi], &a).unwrap();
        assert_eq!(basis.vectors()[0], vec![1.0, 1.0 / kappa]);
    }

    #[test]
    fn sor_forward_generator() {
        let a = tridiag(3);
        let s = state_with_residual(vec![1.0, 1.0, 1.0]);
        let basis = generate_subspace(&s, &[GeneratorSpec::SorForward { omega: 1.0 }], &a).unwrap();
        assert_eq!(basis.vectors()[0], vec![0.5, 0.75, 0.875]);
        let basis = generate_subspace(&s, &[GeneratorSpec::SorBackward { omega: 1.0 }], &a).unwrap();
        assert_eq!(basis.vectors()[0], vec![0.875, 0.75, 0.5]);
    }

    #[test]
    fn zero_generators_are_omitted() {
        let a = tridiag(3);
        let s = state_with_residual(vec![1.0, 0.0, 1.0]);
        // p is zero here
        let basis = generate_subspace(&s, &[GeneratorSpec::CurrentResidual, GeneratorSpec::PreviousIncrement], &a)
            .unwrap();
        assert_eq!(basis.dim(), 1);
        assert!(matches!(
            generate_subspace(&s, &[GeneratorSpec::PreviousIncrement], &a),
            Err(IrmError::DegenerateBasis)
        ));
    }

    #[test]
    fn single_vector_basis_is_steepest_descent() {
        let a = tridiag(20);
        let b: Vec<f64> = (0..20).map(|i| (i as f64).cos()).collect();
        let cfg = SolveConfig { trace_level: TraceLevel::Full, n_max: 30, ..SolveConfig::default() };
        let out = irm_solve(&a, &b, &vec![0.0; 20], &[GeneratorSpec::CurrentResidual], &cfg).unwrap();
        let e = out.trace.energies();
        assert!(e.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn jacobi_plane_solves_diagonal_in_two_steps() {
        let a = SparseSpdMatrix::from_diagonal(&[1.0, 1e6]).unwrap();
        let out = irm_solve(
            &a,
            &[1.0, 1.0],
            &[0.0, 0.0],
            &[GeneratorSpec::CurrentResidual, GeneratorSpec::Jacobi],
            &SolveConfig::default(),
        )
        .unwrap();
        assert!(out.is_converged());
        assert!(out.iterations() <= 2);
    }

    #[test]
    fn too_many_generators_rejected() {
        let a = tridiag(4);
        let cfg = SolveConfig { m_max: 1, ..SolveConfig::default() };
        let specs = [GeneratorSpec::CurrentResidual, GeneratorSpec::PreviousIncrement];
        assert!(irm_solve(&a, &[1.0; 4], &[0.0; 4], &specs, &cfg).is_err());
    }

    #[test]
    fn max_iterations_status() {
        let a = tridiag(50);
        let cfg = SolveConfig { n_max: 3, ..SolveConfig::default() };
        let out = irm_solve(&a, &[1.0; 50], &[0.0; 50], &[GeneratorSpec::CurrentResidual], &cfg).unwrap();
        assert_eq!(out.status(), &Status::MaxIterations);
        assert_eq!(out.iterations(), 3);
        assert!(out.trace.final_rel_residual > cfg.eps);
    }
}
