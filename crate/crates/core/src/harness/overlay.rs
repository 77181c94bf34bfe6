use std::fmt::Write as _;

use rayon::prelude::*;

use super::{method_partitions, ExperimentConfig, MethodName};
use crate::bounds::ArbkBound;
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::linalg::{self, frobenius_distance, Matrix};
use crate::solvers::{self, build_block_cache, Arbk, Iteration, SolveConfig, SolverState};

/// Largest `m` or `q` the bound comparison will take an SVD of.
pub const MAX_BOUNDS_DIM: usize = 2000;

/// Mean squared errors of ARBK against the expected-error bounds, for
/// `k = 0..=K`.
#[derive(Clone, Debug)]
pub struct BoundComparison {
    /// Mean of `‖X^{(k+1)} − X*‖_F²` over the runs.
    pub empirical_x: Vec<f64>,
    /// Mean of `‖Y^{(k)} − Y*‖_F²` over the runs.
    pub empirical_y: Vec<f64>,
    pub bound_x: Option<Vec<f64>>,
    pub bound_y: Option<Vec<f64>>,
    pub factors: Option<ArbkBound>,
    pub x0_err_sq: f64,
    pub y0_err_sq: f64,
    pub runs: usize,
    pub warnings: Vec<String>,
}

fn overlay_csv(empirical: &[f64], bound: Option<&Vec<f64>>) -> String {
    let mut out = String::from("k,empirical,bound\n");
    for (k, e) in empirical.iter().enumerate() {
        match bound {
            Some(b) => {
                let _ = writeln!(out, "{k},{e:e},{:e}", b[k]);
            }
            None => {
                let _ = writeln!(out, "{k},{e:e},");
            }
        }
    }
    out
}

impl BoundComparison {
    /// `k,empirical,bound` for the X-error; `bound` is empty when the
    /// factors could not be computed.
    pub fn x_csv(&self) -> String {
        overlay_csv(&self.empirical_x, self.bound_x.as_ref())
    }

    /// Same layout for the Y-error.
    pub fn y_csv(&self) -> String {
        overlay_csv(&self.empirical_y, self.bound_y.as_ref())
    }

    /// Largest `empirical / bound` over `k`; `None` without a bound.
    pub fn worst_ratio_x(&self) -> Option<f64> {
        ratio(&self.empirical_x, self.bound_x.as_deref()?)
    }

    pub fn worst_ratio_y(&self) -> Option<f64> {
        ratio(&self.empirical_y, self.bound_y.as_deref()?)
    }
}

fn ratio(e: &[f64], b: &[f64]) -> Option<f64> {
    e.iter()
        .zip(b)
        .map(|(e, b)| if *b > 0.0 { e / b } else if *e > 0.0 { f64::INFINITY } else { 0.0 })
        .reduce(f64::max)
}

/// Run ARBK `config.trials` times on one instance and one pair of partitions
/// (both drawn from `base_seed`), varying only the block sampling, and
/// compare the mean squared errors with the expected-error bounds.
///
/// Writes `bounds.csv` (X) and `bounds_y.csv` (Y) to the output directory.
pub fn compare_with_bounds(config: &ExperimentConfig) -> Result<BoundComparison> {
    config.validate()?;
    let [spec] = config.methods.as_slice() else {
        return Err(Error::Parameter(format!(
            "bound comparison takes exactly one method, got {}",
            config.methods.len()
        )));
    };
    if spec.name != MethodName::Arbk {
        return Err(Error::Parameter(format!("bounds are available for arbk only, not {}", spec.name)));
    }
    let (m, _, _, q) = config.family.dims();
    if m > MAX_BOUNDS_DIM || q > MAX_BOUNDS_DIM {
        return Err(Error::Parameter(format!(
            "instance too large for the bound SVDs: m = {m}, q = {q} (limit {MAX_BOUNDS_DIM})"
        )));
    }
    let mut warnings = Vec::new();
    if config.trials == 1 {
        warnings.push("a single run is not an expectation estimate".to_string());
    }

    let problem = config.family.generate(config.base_seed)?;
    let (s, t) = method_partitions(&problem, spec, config.base_seed)?;
    let cache = build_block_cache(&problem.a, &s, &problem.b, &t)?;
    let x_star = solvers::reference_solution(&problem, &SolveConfig::default())?;
    let y_star = linalg::pseudoinverse(&problem.a, linalg::RankTol::Auto)?.matmul(&problem.f)?;
    let x0_err_sq = linalg::frobenius_norm_sq(&x_star);
    let y0_err_sq = linalg::frobenius_norm_sq(&y_star);

    let k_max = config.bound_iters;
    let per_run: Vec<(Vec<f64>, Vec<f64>)> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut method = Arbk::new(&problem, &cache, config.trial_seed(i));
            let mut state = SolverState::zero(&problem);
            let mut xs = Vec::with_capacity(k_max + 1);
            let mut ys = Vec::with_capacity(k_max + 1);
            ys.push(sq_dist(&state.y, &y_star));
            for _ in 0..=k_max {
                method.step(&mut state);
                xs.push(sq_dist(&state.x, &x_star));
                ys.push(sq_dist(&state.y, &y_star));
            }
            ys.pop();
            (xs, ys)
        })
        .collect();
    let mut empirical_x = vec![0.0; k_max + 1];
    let mut empirical_y = vec![0.0; k_max + 1];
    for (xs, ys) in &per_run {
        for k in 0..=k_max {
            empirical_x[k] += xs[k];
            empirical_y[k] += ys[k];
        }
    }
    let n = config.trials as f64;
    empirical_x.iter_mut().for_each(|v| *v /= n);
    empirical_y.iter_mut().for_each(|v| *v /= n);

    let (factors, bound_x, bound_y) = match ArbkBound::for_partitions(&problem.a, &s, &problem.b, &t) {
        Ok(f) => {
            let bx = f.x_error_curve(k_max, x0_err_sq)?.into_iter().map(|(_, v)| v).collect();
            let by = (0..=k_max).map(|k| f.y_error_bound(k, y0_err_sq)).collect::<Result<Vec<_>>>()?;
            (Some(f), Some(bx), Some(by))
        }
        Err(e) => {
            warnings.push(format!("convergence factors unavailable, writing empirical curve only: {e}"));
            (None, None, None)
        }
    };

    let cmp = BoundComparison {
        empirical_x,
        empirical_y,
        bound_x,
        bound_y,
        factors,
        x0_err_sq,
        y0_err_sq,
        runs: config.trials,
        warnings,
    };
    let out = config.output_dir();
    write_atomic(&out.join("bounds.csv"), cmp.x_csv().as_bytes())?;
    write_atomic(&out.join("bounds_y.csv"), cmp.y_csv().as_bytes())?;
    Ok(cmp)
}

fn sq_dist(a: &Matrix, b: &Matrix) -> f64 {
    let d = frobenius_distance(a, b);
    d * d
}
