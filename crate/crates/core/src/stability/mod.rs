//! The two-by-two disturbance experiment.
//!
//! `A = diag(1, k)`, `b = [1, 1]`, `x0 = 0`. Both CG and IRM-CG solve this
//! exactly in two steps. Adding `delta` to the second component of the first
//! search direction leaves IRM-CG exact, because the plane it minimises over
//! still spans the whole space, while CG returns the perturbed point
//!
//! ```text
//! D   = 4(k+1) - 4 delta (k-1) + delta^2 (k-1)^2
//! x~1 = 2 (1/(1+k) + 2(k-1)/D)
//! x~2 = 2 (1/(1+k) + (k-1)(delta(k-1) - 2)/(k D))
//! ```
//!
//! The formula is reproduced by Fletcher-Reeves CG when the disturbance is
//! added to `d0` as it enters `d1 = r1 + g0 d0`, with `x1` left undisturbed.

mod rational;

pub use rational::ExactRational;

use crate::cg::cg_step;
use crate::engine::init_steepest_descent;
use crate::error::{IrmError, Result};
use crate::linalg::{self, CountingOperator, SparseSpdMatrix};
use crate::reduced::{self, SubspaceBasis};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisturbedCase {
    pub kappa: f64,
    pub delta: f64,
}

impl DisturbedCase {
    pub fn new(kappa: f64, delta: f64) -> Result<Self> {
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(IrmError::InvalidConfig(format!("kappa must be finite and >= 1, got {kappa}")));
        }
        if !delta.is_finite() {
            return Err(IrmError::InvalidConfig(format!("delta must be finite, got {delta}")));
        }
        Ok(DisturbedCase { kappa, delta })
    }

    pub fn matrix(&self) -> SparseSpdMatrix {
        SparseSpdMatrix::from_diagonal(&[1.0, self.kappa]).expect("kappa >= 1")
    }

    pub fn exact_solution(&self) -> [f64; 2] {
        [1.0, 1.0 / self.kappa]
    }

    fn denominator(&self) -> Result<f64> {
        let (k, d) = (self.kappa, self.delta);
        let den = 4.0 * (k + 1.0) - 4.0 * d * (k - 1.0) + d * d * (k - 1.0) * (k - 1.0);
        if den == 0.0 || !den.is_finite() {
            return Err(IrmError::SingularPerturbation { delta: d, kappa: k });
        }
        Ok(den)
    }
}

/// The perturbed CG point, evaluated term by term as the closed form reads.
pub fn perturbed_cg_closed_form(case: &DisturbedCase) -> Result<[f64; 2]> {
    let (k, d) = (case.kappa, case.delta);
    let den = case.denominator()?;
    let x1 = 2.0 * (1.0 / (1.0 + k) + 2.0 * (k - 1.0) / den);
    let x2 = 2.0 * (1.0 / (1.0 + k) + (k - 1.0) * (d * (k - 1.0) - 2.0) / (k * den));
    Ok([x1, x2])
}

/// `x~ - x` in a cancellation-free arrangement of the same formula:
/// `delta (k-1)^2 (4 - delta(k-1)) / ((k+1) D)` and
/// `delta (k-1)^3 (2 + delta) / (k (k+1) D)`.
pub fn perturbed_cg_error(case: &DisturbedCase) -> Result<[f64; 2]> {
    let (k, d) = (case.kappa, case.delta);
    let den = case.denominator()?;
    let km1 = k - 1.0;
    let e1 = d * km1 * km1 * (4.0 - d * km1) / ((k + 1.0) * den);
    let e2 = d * km1 * km1 * km1 * (2.0 + d) / (k * (k + 1.0) * den);
    Ok([e1, e2])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisturbedMethod {
    Cg,
    IrmCg,
}

/// Runs two steps of `method` on `A x = b` from `x0 = 0`, adding
/// `disturbance` to the first search direction `d0 = r0` before the second
/// step is formed. Returns the iterate after the second step.
pub fn disturbed_two_steps(a: &SparseSpdMatrix, b: &[f64], method: DisturbedMethod, disturbance: &[f64]) -> Result<Vec<f64>> {
    let n = a.n();
    assert_eq!(disturbance.len(), n, "disturbance: dimension mismatch");
    let op = CountingOperator::new(a);
    let mut state = init_steepest_descent(&op, b, &vec![0.0; n])?;
    if state.is_trivially_converged() {
        return Ok(state.x);
    }
    match method {
        DisturbedMethod::Cg => {
            let dir = state.direction.as_mut().expect("set by init");
            linalg::axpy_in_place(1.0, disturbance, &mut dir.d);
            cg_step(&mut state, &op, false)?;
        }
        DisturbedMethod::IrmCg => {
            linalg::axpy_in_place(1.0, &state.p.clone(), &mut state.x);
            state.r = linalg::sub(b, &op.apply(&state.x));
            // x0 = 0, so d0 = r0 = b
            let d0 = linalg::axpy(1.0, disturbance, b);
            let basis = SubspaceBasis::new(vec![state.r.clone(), d0]);
            let rs = reduced::assemble(&op, &basis, &state.r);
            let sol = reduced::solve(&rs, crate::engine::SolveConfig::default().pivot_tol)?;
            state.p = linalg::combine(&sol.coeffs, &basis.as_slices());
        }
    }
    Ok(linalg::axpy(1.0, &state.p, &state.x))
}

/// The experiment itself: disturbance `delta` on the second component.
pub fn run_disturbed(method: DisturbedMethod, case: &DisturbedCase) -> Result<[f64; 2]> {
    let x = disturbed_two_steps(&case.matrix(), &[1.0, 1.0], method, &[0.0, case.delta])?;
    Ok([x[0], x[1]])
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub kappa: f64,
    pub delta: f64,
    pub err_x1: f64,
    pub err_x2: f64,
}

pub const SWEEP_HEADER: &str = "kappa,delta,err_x1,err_x2";

/// Closed-form error `x~ - x` over the grid `kappas x deltas`, kappa-major.
pub fn disturbance_sweep(kappas: &[f64], deltas: &[f64]) -> Result<Vec<SweepRow>> {
    let cases: Vec<DisturbedCase> = kappas
        .iter()
        .flat_map(|&k| deltas.iter().map(move |&d| (k, d)))
        .map(|(k, d)| DisturbedCase::new(k, d))
        .collect::<Result<_>>()?;
    let row = |c: &DisturbedCase| -> Result<SweepRow> {
        let [e1, e2] = perturbed_cg_error(c)?;
        Ok(SweepRow { kappa: c.kappa, delta: c.delta, err_x1: e1, err_x2: e2 })
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        cases.par_iter().map(row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        cases.iter().map(row).collect()
    }
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 96);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", r.kappa, r.delta, r.err_x1, r.err_x2));
    }
    out
}

/// Largest relative gap between simulated disturbed CG and the closed form.
pub fn max_simulation_deviation(cases: &[DisturbedCase]) -> Result<f64> {
    let mut worst = 0.0f64;
    for c in cases {
        let sim = run_disturbed(DisturbedMethod::Cg, c)?;
        let closed = perturbed_cg_closed_form(c)?;
        worst = worst.max(linalg::rel_diff2(&sim, &closed));
    }
    Ok(worst)
}

type Pair = [ExactRational; 2];

fn dot2(u: &Pair, v: &Pair) -> ExactRational {
    &(&u[0] * &v[0]) + &(&u[1] * &v[1])
}

fn apply2(kappa: &ExactRational, v: &Pair) -> Pair {
    [v[0].clone(), kappa * &v[1]]
}

fn lincomb2(a: &ExactRational, u: &Pair, c: &ExactRational, v: &Pair) -> Pair {
    [&(a * &u[0]) + &(c * &v[0]), &(a * &u[1]) + &(c * &v[1])]
}

/// Outcome of the exact two-by-two runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRun {
    pub x: Pair,
    pub steps: usize,
}

/// Basic IRM-CG on `diag(1, k)`, `b = [1, 1]`, in exact arithmetic, run
/// until the residual is exactly zero.
///
/// # Panics
/// If `kappa < 1`.
pub fn rational_two_step_oracle(kappa: &ExactRational) -> ExactRun {
    let one = ExactRational::one();
    assert!(*kappa >= one, "kappa must be >= 1");
    let zero = ExactRational::zero();
    let b: Pair = [one.clone(), one.clone()];
    let mut x: Pair = [zero.clone(), zero.clone()];
    let r0 = b.clone();
    let q = &dot2(&r0, &r0) / &dot2(&r0, &apply2(kappa, &r0));
    let mut p = lincomb2(&q, &r0, &zero, &r0);
    let mut steps = 0;
    loop {
        x = lincomb2(&one, &x, &one, &p);
        steps += 1;
        let ax = apply2(kappa, &x);
        let r: Pair = [&b[0] - &ax[0], &b[1] - &ax[1]];
        if r.iter().all(ExactRational::is_zero) {
            return ExactRun { x, steps };
        }
        assert!(steps < 3, "two-by-two system must terminate in two steps");
        let (ar, ap) = (apply2(kappa, &r), apply2(kappa, &p));
        let (a11, a12, a22) = (dot2(&r, &ar), dot2(&r, &ap), dot2(&p, &ap));
        let (b1, b2) = (dot2(&r, &r), dot2(&p, &r));
        let det = &(&a11 * &a22) - &(&a12 * &a12);
        p = if det.is_zero() {
            lincomb2(&(&b1 / &a11), &r, &zero, &r)
        } else {
            let c1 = &(&(&a22 * &b1) - &(&a12 * &b2)) / &det;
            let c2 = &(&(&a11 * &b2) - &(&a12 * &b1)) / &det;
            lincomb2(&c1, &r, &c2, &p)
        };
    }
}

/// Fletcher-Reeves CG with the disturbance on `d0`, in exact arithmetic.
pub fn rational_disturbed_cg(kappa: &ExactRational, delta: &ExactRational) -> Pair {
    let one = ExactRational::one();
    let zero = ExactRational::zero();
    let r0: Pair = [one.clone(), one.clone()];
    let d0 = r0.clone();
    let rr0 = dot2(&r0, &r0);
    let ad0 = apply2(kappa, &d0);
    let a0 = &rr0 / &dot2(&d0, &ad0);
    let x1 = lincomb2(&a0, &d0, &zero, &d0);
    let r1 = lincomb2(&one, &r0, &-&a0, &ad0);
    let rr1 = dot2(&r1, &r1);
    let g0 = &rr1 / &rr0;
    let d0t: Pair = [d0[0].clone(), &d0[1] + delta];
    let d1 = lincomb2(&one, &r1, &g0, &d0t);
    let a1 = &rr1 / &dot2(&d1, &apply2(kappa, &d1));
    lincomb2(&one, &x1, &a1, &d1)
}

/// The closed form in exact arithmetic.
pub fn rational_closed_form(kappa: &ExactRational, delta: &ExactRational) -> Pair {
    let i = ExactRational::from_integer;
    let km1 = kappa - &i(1);
    let kp1 = kappa + &i(1);
    let den = &(&(&i(4) * &kp1) - &(&(&i(4) * delta) * &km1)) + &(&(delta * delta) * &(&km1 * &km1));
    let base = &i(1) / &kp1;
    let x1 = &i(2) * &(&base + &(&(&i(2) * &km1) / &den));
    let x2 = &i(2) * &(&base + &(&(&km1 * &(&(delta * &km1) - &i(2))) / &(kappa * &den)));
    [x1, x2]
}
