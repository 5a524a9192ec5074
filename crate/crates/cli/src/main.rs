//! `irm`: solve sparse SPD systems, compare solvers and run the 2x2
//! disturbance experiment.
//!
//! Exit codes: 0 converged, 2 iteration limit reached, 1 solver error,
//! 64 bad arguments, 66 unreadable or unwritable files.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use irm_core::problems::ProblemSpec;
use irm_core::stability::{
    linspace, perturbed_cg_closed_form, run_disturbed, disturbance_sweep, sweep_to_csv, DisturbedCase, DisturbedMethod,
};
use irm_core::{IrmError, Method, Relaxation, SolveConfig, SolveOutcome, Status, TraceFormat, TraceLevel};

const EXIT_MAX_ITER: u8 = 2;
const EXIT_ERROR: u8 = 1;
const EXIT_USAGE: u8 = 64;
const EXIT_NO_INPUT: u8 = 66;

#[derive(Parser)]
#[command(name = "irm", version, about = "Iterated Ritz method solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one system with one method.
    Solve {
        #[command(flatten)]
        common: Common,
        /// cg, cg-restart:K, cg-refresh:K, irm-cg-basic, irm-cg-fast or irm:GEN,...
        #[arg(long, default_value = "irm-cg-fast")]
        method: Method,
        /// Write the convergence trace here.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Run several methods on the same system and print a comparison.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Method to compare; repeat the flag, at least twice.
        #[arg(long = "method", required = true)]
        methods: Vec<Method>,
        /// Directory for one trace file per method.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
    /// Closed-form error table of disturbed CG on diag(1, kappa).
    Stability {
        /// Comma-separated condition numbers.
        #[arg(long, value_delimiter = ',', default_value = "1e1,1e2,1e4")]
        kappas: Vec<f64>,
        #[arg(long, default_value_t = -1e-2, allow_negative_numbers = true)]
        delta_min: f64,
        #[arg(long, default_value_t = 1e-2, allow_negative_numbers = true)]
        delta_max: f64,
        #[arg(long, default_value_t = 401)]
        delta_points: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for TraceFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => TraceFormat::Csv,
            Format::Json => TraceFormat::Json,
        }
    }
}

#[derive(Args)]
struct Common {
    /// mtx:PATH[,rhs=PATH], diagonal:v1,v2,..., logdiag:n=N,kappa=K,
    /// laplacian3d:G, random:n=N,kappa=K[,seed=S] or fem-cube:ne=N,spring=S,...
    #[arg(long)]
    problem: ProblemSpec,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    #[arg(long, default_value_t = 10_000)]
    n_max: usize,
    #[arg(long, default_value_t = 50)]
    i_max: usize,
    /// Relaxation factor, or a comma-separated per-step schedule.
    #[arg(long, value_delimiter = ',', default_value = "1.0")]
    omega: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pivot_tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Record the energy of every iterate.
    #[arg(long)]
    energy: bool,
    /// Zero the wall-clock column so traces are byte-for-byte reproducible.
    #[arg(long)]
    no_wall_clock: bool,
}

impl Common {
    fn config(&self) -> SolveConfig {
        let omega = match self.omega.as_slice() {
            [w] => Relaxation::Constant(*w),
            ws => Relaxation::Schedule(ws.to_vec()),
        };
        SolveConfig {
            eps: self.eps,
            n_max: self.n_max,
            i_max: self.i_max,
            omega,
            pivot_tol: self.pivot_tol,
            trace_level: if self.energy { TraceLevel::Full } else { TraceLevel::Light },
            record_wall_clock: !self.no_wall_clock,
            ..SolveConfig::default()
        }
    }
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

impl From<IrmError> for Failure {
    fn from(e: IrmError) -> Self {
        let code = match e {
            IrmError::Io { .. } | IrmError::Format { .. } => EXIT_NO_INPUT,
            IrmError::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_ERROR,
        };
        Failure { code, err: e.into() }
    }
}

fn usage(msg: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_USAGE, err: anyhow!("{msg}") }
}

fn status_code(status: &Status) -> u8 {
    match status {
        Status::Converged => 0,
        Status::MaxIterations => EXIT_MAX_ITER,
        Status::Error(_) => EXIT_ERROR,
    }
}

fn status_name(status: &Status) -> &str {
    match status {
        Status::Converged => "converged",
        Status::MaxIterations => "max-iterations",
        Status::Error(msg) => msg,
    }
}

fn run_method(method: &Method, common: &Common, a: &irm_core::SparseSpdMatrix, b: &[f64]) -> Result<(SolveOutcome, f64), Failure> {
    let start = Instant::now();
    let out = method.run(a, b, &vec![0.0; a.n()], &common.config())?;
    Ok((out, start.elapsed().as_secs_f64()))
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn solve(common: &Common, method: &Method, trace_out: Option<&Path>) -> Result<u8, Failure> {
    let problem = common.problem.build(common.seed)?;
    let (out, secs) = run_method(method, common, &problem.a, &problem.b)?;
    println!(
        "problem={} n={} method={} status={} iters={} rel_res={:.3e} spmv={} refreshes={} wall={:.3}s",
        problem.name,
        problem.a.n(),
        method,
        status_name(out.status()),
        out.iterations(),
        out.trace.final_rel_residual,
        out.trace.spmv_count(),
        out.trace.refreshes,
        secs
    );
    if let Some(path) = trace_out {
        out.trace.write(path, common.format.into())?;
    }
    Ok(status_code(out.status()))
}

fn bench(common: &Common, methods: &[Method], trace_dir: Option<&Path>) -> Result<u8, Failure> {
    if methods.len() < 2 {
        return Err(usage("bench needs at least two --method flags"));
    }
    let problem = common.problem.build(common.seed)?;
    if let Some(dir) = trace_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure { code: EXIT_NO_INPUT, err: anyhow!("{}: {e}", dir.display()) })?;
    }
    println!("problem={} n={}", problem.name, problem.a.n());
    println!("{:<24} {:>15} {:>8} {:>12} {:>8} {:>9} {:>10}", "method", "status", "iters", "rel_res", "spmv", "refreshes", "wall_s");
    let (mut failed, mut capped) = (false, false);
    for (k, m) in methods.iter().enumerate() {
        let (out, secs) = run_method(m, common, &problem.a, &problem.b)?;
        let status = match out.status() {
            Status::Error(_) => "error",
            s => status_name(s),
        };
        println!(
            "{:<24} {:>15} {:>8} {:>12.3e} {:>8} {:>9} {:>10.3}",
            m.to_string(),
            status,
            out.iterations(),
            out.trace.final_rel_residual,
            out.trace.spmv_count(),
            out.trace.refreshes,
            secs
        );
        if let Status::Error(msg) = out.status() {
            eprintln!("{m}: {msg}");
        }
        if let Some(dir) = trace_dir {
            let safe: String = m.to_string().chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect();
            let path = dir.join(format!("{k:02}_{safe}.{}", extension(common.format)));
            out.trace.write(&path, common.format.into())?;
        }
        failed |= matches!(out.status(), Status::Error(_));
        capped |= out.status() == &Status::MaxIterations;
    }
    Ok(if failed {
        EXIT_ERROR
    } else if capped {
        EXIT_MAX_ITER
    } else {
        0
    })
}

fn stability(kappas: &[f64], lo: f64, hi: f64, points: usize, out: Option<&Path>) -> Result<u8, Failure> {
    if kappas.is_empty() {
        return Err(usage("the kappa list is empty"));
    }
    if points == 0 || !(lo <= hi) {
        return Err(usage("the delta grid is empty"));
    }
    let deltas = linspace(lo, hi, points);
    let rows = disturbance_sweep(kappas, &deltas)?;
    let mut text = sweep_to_csv(&rows);
    text.push_str("# verification: simulated disturbed runs at the grid corners\n");
    text.push_str("# kappa,delta,cg_rel_deviation,irm_cg_rel_error\n");
    let mut worst = 0.0f64;
    for &k in kappas {
        for d in [lo, hi] {
            let case = DisturbedCase::new(k, d)?;
            let sim = run_disturbed(DisturbedMethod::Cg, &case)?;
            let closed = perturbed_cg_closed_form(&case)?;
            let dev = irm_core::linalg::rel_diff2(&sim, &closed);
            let irm = run_disturbed(DisturbedMethod::IrmCg, &case)?;
            let err = irm_core::linalg::rel_diff2(&irm, &case.exact_solution());
            worst = worst.max(dev);
            text.push_str(&format!("# {k:e},{d:e},{dev:.3e},{err:.3e}\n"));
        }
    }
    text.push_str(&format!("# max_deviation={worst:.3e}\n"));
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure { code: EXIT_NO_INPUT, err: anyhow!("{}: {e}", path.display()) })?,
        None => print!("{text}"),
    }
    eprintln!("verification: max closed-form deviation {worst:.3e}");
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve { common, method, trace_out } => solve(common, method, trace_out.as_deref()),
        Command::Bench { common, methods, trace_dir } => bench(common, methods, trace_dir.as_deref()),
        Command::Stability { kappas, delta_min, delta_max, delta_points, out } => {
            stability(kappas, *delta_min, *delta_max, *delta_points, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.err);
            ExitCode::from(f.code)
        }
    }
}
