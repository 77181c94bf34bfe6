//! Alternating randomized block Kaczmarz and the global randomized block
//! Kaczmarz baseline. Both share the cached block pseudoinverses.

use super::cache::{build_block_cache, BlockCache};
use super::sampling::WeightedSampler;
use super::{run, Iteration, SolveConfig, SolveReport, SolverState};
use crate::error::{Error, Result};
use crate::linalg::{self, gemm, Matrix, Op};
use crate::partition::{uniform_index, Partition};
use crate::problems::ProblemInstance;
use crate::rng::{self, Rng, Stream};

/// `Y ← Y + A_{U,:}† (F_{U,:} − A_{U,:} Y)` for `U = S[block]`.
pub fn arbk_y_step(state: &mut SolverState, f: &Matrix, cache: &BlockCache, block: usize) {
    let rows = cache.row_partition().block(block);
    let mut residual = linalg::take_rows_unchecked(f, rows);
    gemm(-1.0, cache.a_block(block), Op::N, &state.y, Op::N, 1.0, &mut residual);
    gemm(1.0, cache.a_pinv(block), Op::N, &residual, Op::N, 1.0, &mut state.y);
}

/// `X ← X + (Y_{:,V} − X B_{:,V}) B_{:,V}†` for `V = T[block]`.
pub fn arbk_x_step(state: &mut SolverState, cache: &BlockCache, block: usize) {
    let cols = cache.col_partition().block(block);
    let mut residual = linalg::take_cols_unchecked(&state.y, cols);
    gemm(-1.0, &state.x, Op::N, cache.b_block(block), Op::N, 1.0, &mut residual);
    gemm(1.0, &residual, Op::N, cache.b_pinv(block), Op::N, 1.0, &mut state.x);
}

/// ARBK: uniform block draws, Y-block first, then X-block, from one stream.
pub struct Arbk<'a> {
    f: &'a Matrix,
    cache: &'a BlockCache,
    rng: Rng,
    last: Option<(usize, usize)>,
}

impl<'a> Arbk<'a> {
    pub fn new(problem: &'a ProblemInstance, cache: &'a BlockCache, seed: u64) -> Self {
        Arbk {
            f: &problem.f,
            cache,
            rng: rng::stream(seed, Stream::Sampling),
            last: None,
        }
    }

    /// `(U index, V index)` chosen by the most recent step.
    pub fn last_selection(&self) -> Option<(usize, usize)> {
        self.last
    }
}

impl Iteration for Arbk<'_> {
    fn step(&mut self, state: &mut SolverState) {
        let u = uniform_index(self.cache.row_partition().len(), &mut self.rng);
        arbk_y_step(state, self.f, self.cache, u);
        let v = uniform_index(self.cache.col_partition().len(), &mut self.rng);
        arbk_x_step(state, self.cache, v);
        self.last = Some((u, v));
    }
}

pub fn solve_arbk(
    problem: &ProblemInstance,
    s: &Partition,
    t: &Partition,
    config: &SolveConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let cache = build_block_cache(&problem.a, s, &problem.b, t)?;
    let mut method = Arbk::new(problem, &cache, config.seed);
    let mut report = run(&mut method, SolverState::zero(problem), problem, config)?;
    report.setup_seconds = cache.build_seconds();
    Ok(report)
}

/// Global block step directly on `A_{U,:} X B_{:,V} = F_{U,V}`:
/// `X ← X + A_{U,:}† (F_{U,V} − A_{U,:} X B_{:,V}) B_{:,V}†`.
pub fn grbk_step(x: &mut Matrix, f: &Matrix, cache: &BlockCache, u: usize, v: usize) {
    let rows = cache.row_partition().block(u);
    let cols = cache.col_partition().block(v);
    let a_u = cache.a_block(u);
    let b_v = cache.b_block(v);

    let f_u = linalg::take_rows_unchecked(f, rows);
    let mut residual = linalg::take_cols_unchecked(&f_u, cols);
    let mut ax = Matrix::zeros(a_u.rows(), x.cols());
    gemm(1.0, a_u, Op::N, x, Op::N, 0.0, &mut ax);
    gemm(-1.0, &ax, Op::N, b_v, Op::N, 1.0, &mut residual);

    let mut left = Matrix::zeros(x.rows(), cols.len());
    gemm(1.0, cache.a_pinv(u), Op::N, &residual, Op::N, 0.0, &mut left);
    gemm(1.0, &left, Op::N, cache.b_pinv(v), Op::N, 1.0, x);
}

/// GRBK: blocks drawn with probability `‖A_{U,:}‖²_F/‖A‖²_F` and
/// `‖B_{:,V}‖²_F/‖B‖²_F`. Works on `X` only; `Y` is left untouched.
pub struct Grbk<'a> {
    f: &'a Matrix,
    cache: &'a BlockCache,
    rows: WeightedSampler,
    cols: WeightedSampler,
    rng: Rng,
}

impl<'a> Grbk<'a> {
    pub fn new(problem: &'a ProblemInstance, cache: &'a BlockCache, seed: u64) -> Result<Self> {
        let row_w: Vec<f64> = (0..cache.row_partition().len())
            .map(|i| linalg::frobenius_norm_sq(cache.a_block(i)))
            .collect();
        let col_w: Vec<f64> = (0..cache.col_partition().len())
            .map(|j| linalg::frobenius_norm_sq(cache.b_block(j)))
            .collect();
        let rows = WeightedSampler::new(&row_w)
            .map_err(|e| Error::Domain(format!("GRBK row blocks: {e}")))?;
        let cols = WeightedSampler::new(&col_w)
            .map_err(|e| Error::Domain(format!("GRBK column blocks: {e}")))?;
        Ok(Grbk {
            f: &problem.f,
            cache,
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

impl Iteration for Grbk<'_> {
    fn step(&mut self, state: &mut SolverState) {
        let u = self.rows.sample(&mut self.rng);
        let v = self.cols.sample(&mut self.rng);
        grbk_step(&mut state.x, self.f, self.cache, u, v);
    }
}

pub fn solve_grbk(
    problem: &ProblemInstance,
    s: &Partition,
    t: &Partition,
    config: &SolveConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let cache = build_block_cache(&problem.a, s, &problem.b, t)?;
    let mut method = Grbk::new(problem, &cache, config.seed)?;
    let mut report = run(&mut method, SolverState::zero(problem), problem, config)?;
    report.setup_seconds = cache.build_seconds();
    Ok(report)
}
