//! Experiment orchestration: repeated seeded trials, per-method summaries,
//! bound overlays and the command-line front end.

mod cli;
mod config;
mod overlay;

use std::fmt::Write as _;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::partition::{block_count_for_size, column_random_partition, row_random_partition, Partition};
use crate::problems::ProblemInstance;
use crate::rng::{stream, Stream};
use crate::solvers::{self, SolveConfig, SolveReport, StepSize, Termination};

pub use cli::cli_main;
pub use config::{ExperimentConfig, Family, MethodName, MethodSpec, OUTPUT_ENV};
pub use overlay::{compare_with_bounds, BoundComparison, MAX_BOUNDS_DIM};

pub const SUMMARY_HEADER: &str = "method,tau_a,tau_b,trials,mean_rse,median_it,mean_it,mean_cpu_s,failures";

/// Row and column partitions for a block method; both are drawn from
/// `seed` alone, so methods with equal block sizes share them.
pub fn method_partitions(problem: &ProblemInstance, spec: &MethodSpec, seed: u64) -> Result<(Partition, Partition)> {
    let (m, _, _, q) = problem.dims();
    let (Some(ta), Some(tb)) = (spec.tau_a, spec.tau_b) else {
        return Err(Error::Parameter(format!("{} needs block sizes", spec.name)));
    };
    let s = row_random_partition(m, block_count_for_size(m, ta)?, &mut stream(seed, Stream::RowPartition))?;
    let t = column_random_partition(q, block_count_for_size(q, tb)?, &mut stream(seed, Stream::ColumnPartition))?;
    Ok((s, t))
}

/// Run one method on `problem`; `seed` drives the partitions and sampling.
pub fn run_method(problem: &ProblemInstance, spec: &MethodSpec, seed: u64, config: &SolveConfig) -> Result<SolveReport> {
    let config = SolveConfig {
        seed,
        ..config.clone()
    };
    match spec.name {
        MethodName::Arbk => {
            let (s, t) = method_partitions(problem, spec, seed)?;
            solvers::solve_arbk(problem, &s, &t, &config)
        }
        MethodName::Grbk => {
            let (s, t) = method_partitions(problem, spec, seed)?;
            solvers::solve_grbk(problem, &s, &t, &config)
        }
        MethodName::CmeRk => solvers::solve_cme_rk(problem, &config),
        MethodName::Gradient => {
            let step = spec.step.map_or(StepSize::Auto, StepSize::Fixed);
            solvers::solve_gradient(problem, step, &config)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunOutcome {
    ToleranceReached,
    MaxItersExceeded,
    /// The solver returned an error or panicked.
    Failed,
}

/// One method on one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: MethodName,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub tau_a: Option<usize>,
    pub tau_b: Option<usize>,
    pub seed: u64,
    /// `max_iters` for runs that did not converge.
    pub iterations: usize,
    /// `None` for failed runs.
    pub rse: Option<f64>,
    /// Setup plus iteration wall clock.
    pub elapsed_seconds: f64,
    pub termination: RunOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunRecord {
    pub fn converged(&self) -> bool {
        self.termination == RunOutcome::ToleranceReached
    }
}

/// Aggregate of one method over all trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodSummary {
    pub method: MethodSpec,
    pub trials: usize,
    /// Over runs that produced an error value.
    pub mean_rse: f64,
    pub median_rse: f64,
    pub mean_it: f64,
    pub median_it: f64,
    pub mean_cpu_s: f64,
    /// Runs that hit `max_iters` or failed.
    pub failures: usize,
    pub converged: usize,
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn median(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let mid = s.len() / 2;
    if s.len() % 2 == 1 {
        s[mid]
    } else {
        0.5 * (s[mid - 1] + s[mid])
    }
}

impl MethodSummary {
    pub fn from_records(method: MethodSpec, records: &[&RunRecord]) -> Self {
        let rse: Vec<f64> = records.iter().filter_map(|r| r.rse).collect();
        let it: Vec<f64> = records.iter().map(|r| r.iterations as f64).collect();
        let cpu: Vec<f64> = records.iter().map(|r| r.elapsed_seconds).collect();
        let converged = records.iter().filter(|r| r.converged()).count();
        MethodSummary {
            method,
            trials: records.len(),
            mean_rse: mean(&rse),
            median_rse: median(&rse),
            mean_it: mean(&it),
            median_it: median(&it),
            mean_cpu_s: mean(&cpu),
            failures: records.len() - converged,
            converged,
        }
    }

    fn csv_row(&self) -> String {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{:e},{},{},{:.6},{}",
            self.method.name,
            opt(self.method.tau_a),
            opt(self.method.tau_b),
            self.trials,
            self.mean_rse,
            self.median_it,
            self.mean_it,
            self.mean_cpu_s,
            self.failures
        )
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSummary {
    pub methods: Vec<MethodSummary>,
    /// Trial-major, in method order within a trial.
    pub records: Vec<RunRecord>,
    pub max_iters: usize,
    pub output_dir: PathBuf,
}

impl ExperimentSummary {
    pub fn method(&self, key: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method.key() == key)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        for m in &self.methods {
            out.push_str(&m.csv_row());
            out.push('\n');
        }
        out
    }

    /// Plain-text table; methods that never converged show `>max_iters`.
    pub fn render_table(&self) -> String {
        let mut out = format!(
            "{:<16} {:>10} {:>12} {:>12} {:>10} {:>9}\n",
            "method", "mean RSE", "median IT", "mean IT", "CPU (s)", "failures"
        );
        for m in &self.methods {
            let (med, avg) = if m.converged == 0 {
                let s = format!(">{}", self.max_iters);
                (s.clone(), s)
            } else {
                (format!("{:.1}", m.median_it), format!("{:.1}", m.mean_it))
            };
            let _ = writeln!(
                out,
                "{:<16} {:>10.2e} {:>12} {:>12} {:>10.4} {:>6}/{:<2}",
                m.method.label(),
                m.mean_rse,
                med,
                avg,
                m.mean_cpu_s,
                m.failures,
                m.trials
            );
        }
        out
    }
}

fn record_for(
    problem: &ProblemInstance,
    spec: &MethodSpec,
    seed: u64,
    max_iters: usize,
    outcome: &Result<SolveReport>,
) -> RunRecord {
    let (m, n, p, q) = problem.dims();
    let mut rec = RunRecord {
        method: spec.name,
        m,
        n,
        p,
        q,
        tau_a: spec.tau_a,
        tau_b: spec.tau_b,
        seed,
        iterations: max_iters,
        rse: None,
        elapsed_seconds: 0.0,
        termination: RunOutcome::Failed,
        error: None,
    };
    match outcome {
        Ok(r) => {
            rec.rse = Some(r.rse);
            rec.elapsed_seconds = r.elapsed_seconds + r.setup_seconds;
            match r.termination {
                Termination::ToleranceReached => {
                    rec.iterations = r.iterations;
                    rec.termination = RunOutcome::ToleranceReached;
                }
                Termination::MaxItersExceeded => rec.termination = RunOutcome::MaxItersExceeded,
            }
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "solver panicked".to_string()
    }
}

fn run_trial(
    config: &ExperimentConfig,
    trial: usize,
    fixed: Option<&ProblemInstance>,
    out: &Path,
) -> Result<Vec<RunRecord>> {
    let seed = config.trial_seed(trial);
    let generated;
    let problem = match fixed {
        Some(p) => p,
        None => {
            generated = config.family.generate(seed)?;
            &generated
        }
    };
    let solve_cfg = SolveConfig {
        max_iters: config.max_iters,
        rse_tol: config.rse_tol,
        seed,
        trace_stride: config.trace_stride,
        reference_solution: None,
    };
    let mut records = Vec::with_capacity(config.methods.len());
    for spec in &config.methods {
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| run_method(problem, spec, seed, &solve_cfg)))
            .unwrap_or_else(|payload| Err(Error::Domain(format!("panic: {}", panic_message(payload)))));
        let rec = record_for(problem, spec, seed, config.max_iters, &outcome);
        let stem = format!("{}_trial{trial:03}", spec.key());
        if let Ok(report) = &outcome {
            write_atomic(&out.join("traces").join(format!("{stem}.csv")), report.trace_csv().as_bytes())?;
        }
        write_atomic(
            &out.join("runs").join(format!("{stem}.json")),
            serde_json::to_string_pretty(&rec)?.as_bytes(),
        )?;
        records.push(rec);
    }
    Ok(records)
}

/// Run every method on `config.trials` seeded trials and write
/// `summary.csv`, `runs/*.json` and `traces/*.csv` under the output
/// directory.
///
/// Trial `i` uses seed `base_seed + i` for the instance (random families),
/// the partitions and the block/index sampling. Within a trial all methods
/// see the same instance. A solver error or panic is recorded as a failed
/// run and the experiment continues.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    let out = config.output_dir();
    std::fs::create_dir_all(&out)?;
    let fixed = if config.fix_instance || !config.family.is_random() {
        Some(config.family.generate(config.base_seed)?)
    } else {
        None
    };
    let per_trial: Vec<Result<Vec<RunRecord>>> = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(config, i, fixed.as_ref(), &out))
        .collect();
    let mut records = Vec::with_capacity(config.trials * config.methods.len());
    for r in per_trial {
        records.extend(r?);
    }
    let methods = config
        .methods
        .iter()
        .enumerate()
        .map(|(k, spec)| {
            let mine: Vec<&RunRecord> = records.iter().skip(k).step_by(config.methods.len()).collect();
            MethodSummary::from_records(spec.clone(), &mine)
        })
        .collect();
    let summary = ExperimentSummary {
        methods,
        records,
        max_iters: config.max_iters,
        output_dir: out.clone(),
    };
    write_atomic(&out.join("summary.csv"), summary.summary_csv().as_bytes())?;
    write_atomic(&out.join("config.json"), config.to_json().as_bytes())?;
    Ok(summary)
}
