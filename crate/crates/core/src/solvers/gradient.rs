//! Gradient iteration on `½‖F − AXB‖²_F`, the LSPIA-style baseline.

use super::{run, Iteration, SolveConfig, SolveReport, SolverState};
use crate::error::{Error, Result};
use crate::linalg::{self, gemm, Matrix, Op};
use crate::problems::ProblemInstance;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum StepSize {
    /// `1 / (σ_max²(A) σ_max²(B))`.
    #[default]
    Auto,
    Fixed(f64),
}

/// `X ← X + μ Aᵀ (F − A X B) Bᵀ`.
pub struct Gradient<'a> {
    problem: &'a ProblemInstance,
    step: f64,
}

impl<'a> Gradient<'a> {
    pub fn new(problem: &'a ProblemInstance, step: StepSize) -> Result<Self> {
        let (_, smax_a) = linalg::extreme_singular_values(&problem.a)?;
        let (_, smax_b) = linalg::extreme_singular_values(&problem.b)?;
        let lipschitz = smax_a * smax_a * smax_b * smax_b;
        let step = match step {
            StepSize::Auto => 1.0 / lipschitz,
            StepSize::Fixed(mu) => {
                if !(mu > 0.0 && mu < 2.0 / lipschitz) {
                    return Err(Error::Parameter(format!(
                        "step size {mu} outside the convergent range (0, {})",
                        2.0 / lipschitz
                    )));
                }
                mu
            }
        };
        Ok(Gradient { problem, step })
    }

    pub fn step_size(&self) -> f64 {
        self.step
    }
}

impl Iteration for Gradient<'_> {
    fn step(&mut self, state: &mut SolverState) {
        let ProblemInstance { a, b, f, .. } = self.problem;
        let mut ax = Matrix::zeros(a.rows(), state.x.cols());
        gemm(1.0, a, Op::N, &state.x, Op::N, 0.0, &mut ax);
        let mut residual = f.clone();
        gemm(-1.0, &ax, Op::N, b, Op::N, 1.0, &mut residual);
        let mut atr = Matrix::zeros(a.cols(), residual.cols());
        gemm(1.0, a, Op::T, &residual, Op::N, 0.0, &mut atr);
        gemm(self.step, &atr, Op::N, b, Op::T, 1.0, &mut state.x);
    }
}

pub fn solve_gradient(problem: &ProblemInstance, step: StepSize, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut method = Gradient::new(problem, step)?;
    run(&mut method, SolverState::zero(problem), problem, config)
}
