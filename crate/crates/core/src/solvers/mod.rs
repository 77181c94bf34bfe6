//! Iterative solvers for `AXB = F`.
//!
//! Every method is an [`Iteration`]: a value that advances a [`SolverState`]
//! by one outer iteration. [`run`] drives any of them from a given state,
//! measuring the relative solution error against a reference solution
//! resolved before the first step and stopping on tolerance or iteration cap.

mod arbk;
mod cache;
mod cme_rk;
mod gradient;
mod petrov_galerkin;
mod sampling;

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::problems::ProblemInstance;

pub use arbk::{arbk_x_step, arbk_y_step, grbk_step, solve_arbk, solve_grbk, Arbk, Grbk};
pub use cache::{build_block_cache, BlockCache};
pub use cme_rk::{cme_rk_x_step, cme_rk_y_step, solve_cme_rk, CmeRk};
pub use gradient::{solve_gradient, Gradient, StepSize};
pub use petrov_galerkin::{pg_iterate_x, pg_iterate_y};
pub use sampling::WeightedSampler;

/// Iterates of one solve: `X` (n×p) and the auxiliary `Y` (n×q).
#[derive(Clone, Debug)]
pub struct SolverState {
    pub x: Matrix,
    pub y: Matrix,
    pub iteration: usize,
}

impl SolverState {
    /// Start from `x0` with `Y⁰ = X⁰B`.
    pub fn new(x0: Matrix, b: &Matrix) -> Result<Self> {
        let y = x0.matmul(b)?;
        Ok(SolverState {
            x: x0,
            y,
            iteration: 0,
        })
    }

    /// `X⁰ = 0`, `Y⁰ = 0`.
    pub fn zero(problem: &ProblemInstance) -> Self {
        let (_, n, p, q) = problem.dims();
        SolverState {
            x: Matrix::zeros(n, p),
            y: Matrix::zeros(n, q),
            iteration: 0,
        }
    }
}

/// One outer iteration of a solver.
pub trait Iteration {
    fn step(&mut self, state: &mut SolverState);
}

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub max_iters: usize,
    pub rse_tol: f64,
    pub seed: u64,
    /// Record the error every `trace_stride` iterations (the first and last
    /// iterations are always recorded).
    pub trace_stride: usize,
    /// `X*` for the error measure; falls back to the problem's `x_star`, then
    /// to `A†FB†`.
    pub reference_solution: Option<Matrix>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_iters: 100_000,
            rse_tol: 5e-2,
            seed: 0,
            trace_stride: 1,
            reference_solution: None,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be at least 1".into()));
        }
        if !(self.rse_tol > 0.0) {
            return Err(Error::Parameter(format!("rse_tol must be positive, got {}", self.rse_tol)));
        }
        if self.trace_stride == 0 {
            return Err(Error::Parameter("trace_stride must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceReached,
    MaxItersExceeded,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub rse: f64,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub final_x: Matrix,
    pub iterations: usize,
    pub termination: Termination,
    /// Error at the last iteration.
    pub rse: f64,
    /// `false` when `‖X*‖_F = 0` and the error is absolute instead.
    pub relative: bool,
    /// Wall clock of the iteration loop only.
    pub elapsed_seconds: f64,
    /// Wall clock of one-off setup such as block pseudoinverses.
    pub setup_seconds: f64,
    pub trace: Vec<TracePoint>,
}

impl SolveReport {
    /// CSV with header `iteration,rse`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,rse\n");
        for p in &self.trace {
            let _ = writeln!(out, "{},{:e}", p.iteration, p.rse);
        }
        out
    }
}

/// Resolve the reference solution for error measurement.
pub fn reference_solution(problem: &ProblemInstance, config: &SolveConfig) -> Result<Matrix> {
    let (_, n, p, _) = problem.dims();
    let x = match (&config.reference_solution, &problem.x_star) {
        (Some(x), _) => x.clone(),
        (None, Some(x)) => x.clone(),
        (None, None) => problem.min_norm_solution()?,
    };
    if x.shape() != (n, p) {
        return Err(Error::dim(
            "reference_solution",
            format!("{:?}, expected ({n}, {p})", x.shape()),
        ));
    }
    Ok(x)
}

/// Relative (or, for a zero reference, absolute) Frobenius error.
pub(crate) struct ErrorMeasure {
    reference: Matrix,
    scale: f64,
}

impl ErrorMeasure {
    pub(crate) fn new(reference: Matrix) -> Self {
        let norm = linalg::frobenius_norm(&reference);
        ErrorMeasure {
            scale: if norm > 0.0 { 1.0 / norm } else { 1.0 },
            reference,
        }
    }

    fn relative(&self) -> bool {
        linalg::frobenius_norm(&self.reference) > 0.0
    }

    pub(crate) fn eval(&self, x: &Matrix) -> f64 {
        linalg::frobenius_distance(x, &self.reference) * self.scale
    }
}

/// Drive `method` from `state` until the error drops to `config.rse_tol` or
/// `config.max_iters` outer iterations have run.
pub fn run<I: Iteration>(
    method: &mut I,
    mut state: SolverState,
    problem: &ProblemInstance,
    config: &SolveConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let measure = ErrorMeasure::new(reference_solution(problem, config)?);
    let (_, n, p, q) = problem.dims();
    if state.x.shape() != (n, p) || state.y.shape() != (n, q) {
        return Err(Error::dim(
            "run",
            format!(
                "state X {:?} / Y {:?} for an n={n}, p={p}, q={q} problem",
                state.x.shape(),
                state.y.shape()
            ),
        ));
    }

    let mut rse = measure.eval(&state.x);
    let mut trace = vec![TracePoint {
        iteration: state.iteration,
        rse,
    }];
    let start = Instant::now();
    let mut termination = if rse <= config.rse_tol {
        Termination::ToleranceReached
    } else {
        Termination::MaxItersExceeded
    };
    let first = state.iteration;
    while termination == Termination::MaxItersExceeded && state.iteration - first < config.max_iters {
        method.step(&mut state);
        state.iteration += 1;
        rse = measure.eval(&state.x);
        let done = rse <= config.rse_tol;
        let last = state.iteration - first == config.max_iters;
        if done || last || state.iteration.is_multiple_of(config.trace_stride) {
            trace.push(TracePoint {
                iteration: state.iteration,
                rse,
            });
        }
        if done {
            termination = Termination::ToleranceReached;
        }
    }
    let elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(SolveReport {
        iterations: state.iteration - first,
        final_x: state.x,
        termination,
        rse,
        relative: measure.relative(),
        elapsed_seconds,
        setup_seconds: 0.0,
        trace,
    })
}
