//! Single-row / single-column alternating Kaczmarz with norm-proportional
//! index sampling.

use super::sampling::WeightedSampler;
use super::{run, Iteration, SolveConfig, SolveReport, SolverState};
use crate::error::{Error, Result};
use crate::linalg::{kernels, Matrix};
use crate::problems::ProblemInstance;
use crate::rng::{self, Rng, Stream};

/// `Y ← Y + A_{i,:}ᵀ (F_{i,:} − A_{i,:} Y) / ‖A_{i,:}‖²`.
pub fn cme_rk_y_step(y: &mut Matrix, a: &Matrix, f: &Matrix, i: usize, row_norm_sq: f64) {
    let a_i = a.row(i);
    let mut r = f.row(i).to_vec();
    for (k, &coef) in a_i.iter().enumerate() {
        if coef != 0.0 {
            kernels::axpy(-coef, y.row(k), &mut r);
        }
    }
    let inv = 1.0 / row_norm_sq;
    for (k, &coef) in a_i.iter().enumerate() {
        let c = coef * inv;
        if c != 0.0 {
            kernels::axpy(c, &r, y.row_mut(k));
        }
    }
}

/// `X ← X + (Y_{:,j} − X B_{:,j}) B_{:,j}ᵀ / ‖B_{:,j}‖²`.
pub fn cme_rk_x_step(x: &mut Matrix, b: &Matrix, y: &Matrix, j: usize, col_norm_sq: f64) {
    x_step_with_column(x, &b.column(j), y, j, col_norm_sq);
}

fn x_step_with_column(x: &mut Matrix, b_j: &[f64], y: &Matrix, j: usize, col_norm_sq: f64) {
    let inv = 1.0 / col_norm_sq;
    for i in 0..x.rows() {
        let row = x.row_mut(i);
        let c = (y[(i, j)] - kernels::dot(row, b_j)) * inv;
        kernels::axpy(c, b_j, row);
    }
}

pub struct CmeRk<'a> {
    a: &'a Matrix,
    /// `Bᵀ`, so that columns of `B` are contiguous.
    b_t: Matrix,
    f: &'a Matrix,
    row_norms: Vec<f64>,
    col_norms: Vec<f64>,
    rows: WeightedSampler,
    cols: WeightedSampler,
    rng: Rng,
}

impl<'a> CmeRk<'a> {
    pub fn new(problem: &'a ProblemInstance, seed: u64) -> Result<Self> {
        let a = &problem.a;
        let b = &problem.b;
        let row_norms: Vec<f64> = (0..a.rows())
            .map(|i| a.row(i).iter().map(|v| v * v).sum())
            .collect();
        let mut col_norms = vec![0.0; b.cols()];
        for i in 0..b.rows() {
            for (acc, v) in col_norms.iter_mut().zip(b.row(i)) {
                *acc += v * v;
            }
        }
        let rows = WeightedSampler::new(&row_norms)
            .map_err(|_| Error::Domain("A has no nonzero row".into()))?;
        let cols = WeightedSampler::new(&col_norms)
            .map_err(|_| Error::Domain("B has no nonzero column".into()))?;
        Ok(CmeRk {
            a,
            b_t: b.transpose(),
            f: &problem.f,
            row_norms,
            col_norms,
            rows,
            cols,
            rng: rng::stream(seed, Stream::Sampling),
        })
    }

    pub fn row_sampler(&self) -> &WeightedSampler {
        &self.rows
    }

    pub fn col_sampler(&self) -> &WeightedSampler {
        &self.cols
    }
}

impl Iteration for CmeRk<'_> {
    fn step(&mut self, state: &mut SolverState) {
        let i = self.rows.sample(&mut self.rng);
        cme_rk_y_step(&mut state.y, self.a, self.f, i, self.row_norms[i]);
        let j = self.cols.sample(&mut self.rng);
        x_step_with_column(&mut state.x, self.b_t.row(j), &state.y, j, self.col_norms[j]);
    }
}

pub fn solve_cme_rk(problem: &ProblemInstance, config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut method = CmeRk::new(problem, config.seed)?;
    run(&mut method, SolverState::zero(problem), problem, config)
}
