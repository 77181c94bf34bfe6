use std::ffi::OsString;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use super::{compare_with_bounds, run_experiment, run_method, ExperimentConfig, Family, MethodSpec};
use crate::error::{Error, Result};
use crate::io::{read_instance, write_atomic, write_instance};
use crate::problems::{surface_samples, SmatrixSpec, Surface};
use crate::solvers::SolveConfig;

#[derive(Parser, Debug)]
#[command(name = "kmeq", version, about = "Randomized block Kaczmarz solvers for AXB = F")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a problem instance and write it as matrix CSVs.
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for A.csv, B.csv, F.csv, X_star.csv and instance.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one method once and print a JSON report.
    Solve(SolveArgs),
    /// Run a repeated-trial experiment and write summary.csv.
    Bench(ExperimentArgs),
    /// Compare ARBK's mean squared error with the expected-error bounds.
    Bounds(ExperimentArgs),
    /// Export sampled surface grids as CSV.
    Surfaces {
        /// Both surfaces when omitted.
        #[arg(long)]
        which: Option<Surface>,
        #[arg(long, default_value_t = 150)]
        m: usize,
        #[arg(long, default_value_t = 150)]
        q: usize,
        /// Output directory (default: $KMEQ_OUT or ./kmeq_out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyKind {
    Gaussian,
    Smatrix,
    Bspline,
}

#[derive(Args, Debug, Default)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Option<FamilyKind>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    /// Smatrix rank of both A and B (default: full).
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long)]
    surface: Option<Surface>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

impl FamilyArgs {
    fn family(&self) -> Result<Option<Family>> {
        let Some(kind) = self.family else {
            return Ok(None);
        };
        let need = |v: Option<usize>, name: &str| v.ok_or_else(|| usage(format!("--family needs --{name}")));
        let (m, n, p, q) = (need(self.m, "m")?, need(self.n, "n")?, need(self.p, "p")?, need(self.q, "q")?);
        Ok(Some(match kind {
            FamilyKind::Gaussian => Family::Gaussian { m, n, p, q },
            FamilyKind::Smatrix => {
                let sigma1 = self.sigma1.ok_or_else(|| usage("smatrix needs --sigma1"))?;
                let sigma2 = self.sigma2.ok_or_else(|| usage("smatrix needs --sigma2"))?;
                let spec = |rows: usize, cols: usize| SmatrixSpec {
                    rows,
                    cols,
                    rank: self.rank.unwrap_or(rows.min(cols)),
                    sigma1,
                    sigma2,
                };
                Family::Smatrix {
                    a: spec(m, n),
                    b: spec(p, q),
                }
            }
            FamilyKind::Bspline => Family::Bspline {
                surface: self.surface.unwrap_or(Surface::Surface1),
                m,
                q,
                n,
                p,
            },
        }))
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Instance directory written by `generate`.
    #[arg(long, conflicts_with = "family")]
    instance: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long)]
    method: super::MethodName,
    #[arg(long)]
    tau_a: Option<usize>,
    #[arg(long)]
    tau_b: Option<usize>,
    /// Gradient step size (default: 1/L).
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5e-2)]
    rse_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Write the `iteration,rse` trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    /// Repeatable: `arbk:50:50`, `grbk:50:50`, `cme_rk`, `gradient[:step]`.
    #[arg(long = "method")]
    methods: Vec<MethodSpec>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    rse_tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    fix_instance: bool,
    #[arg(long)]
    trace_stride: Option<usize>,
    /// Iterations tracked by `bounds`.
    #[arg(long)]
    bound_iters: Option<usize>,
}

impl ExperimentArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => {
                let family = self
                    .family
                    .family()?
                    .ok_or_else(|| usage("give --config or --family with its dimensions"))?;
                ExperimentConfig::new(family, Vec::new())
            }
        };
        if self.config.is_some() {
            if let Some(f) = self.family.family()? {
                cfg.family = f;
            }
        }
        if !self.methods.is_empty() {
            cfg.methods = self.methods.clone();
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.rse_tol {
            cfg.rse_tol = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.base_seed {
            cfg.base_seed = v;
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = Some(v.clone());
        }
        if self.fix_instance {
            cfg.fix_instance = true;
        }
        if let Some(v) = self.trace_stride {
            cfg.trace_stride = v;
        }
        if let Some(v) = self.bound_iters {
            cfg.bound_iters = v;
        }
        Ok(cfg)
    }
}

fn default_out() -> PathBuf {
    ExperimentConfig::new(
        Family::Gaussian {
            m: 1,
            n: 1,
            p: 1,
            q: 1,
        },
        Vec::new(),
    )
    .output_dir()
}

fn exec(cmd: Command, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> Result<()> {
    match cmd {
        Command::Generate { family, seed, out } => {
            let fam = family.family()?.ok_or_else(|| usage("generate needs --family"))?;
            fam.validate()?;
            let problem = fam.generate(seed)?;
            write_instance(&out, &problem)?;
            for note in &problem.provenance.notes {
                writeln!(stderr, "kmeq: warning: {note}")?;
            }
            writeln!(stdout, "{}", out.display())?;
        }
        Command::Solve(args) => {
            let (problem, seed) = match (&args.instance, args.family.family()?) {
                (Some(dir), _) => (read_instance(dir)?, args.seed),
                (None, Some(f)) => {
                    f.validate()?;
                    (f.generate(args.seed)?, args.seed)
                }
                (None, None) => return Err(usage("solve needs --instance or --family")),
            };
            let spec = MethodSpec {
                name: args.method,
                tau_a: args.tau_a,
                tau_b: args.tau_b,
                step: args.step,
            };
            spec.validate(problem.dims())?;
            let cfg = SolveConfig {
                max_iters: args.max_iters,
                rse_tol: args.rse_tol,
                ..Default::default()
            };
            let report = run_method(&problem, &spec, seed, &cfg)?;
            if let Some(path) = &args.trace {
                write_atomic(path, report.trace_csv().as_bytes())?;
            }
            let (m, n, p, q) = problem.dims();
            let out = json!({
                "method": spec.name,
                "m": m, "n": n, "p": p, "q": q,
                "tau_a": spec.tau_a,
                "tau_b": spec.tau_b,
                "seed": seed,
                "iterations": report.iterations,
                "rse": report.rse,
                "relative": report.relative,
                "elapsed_seconds": report.elapsed_seconds,
                "setup_seconds": report.setup_seconds,
                "termination": report.termination,
            });
            writeln!(stdout, "{}", serde_json::to_string_pretty(&out)?)?;
        }
        Command::Bench(args) => {
            let cfg = args.config()?;
            let summary = run_experiment(&cfg)?;
            write!(stdout, "{}", summary.render_table())?;
            writeln!(stdout, "summary: {}", summary.output_dir.join("summary.csv").display())?;
        }
        Command::Bounds(args) => {
            let cfg = args.config()?;
            let cmp = compare_with_bounds(&cfg)?;
            for w in &cmp.warnings {
                writeln!(stderr, "kmeq: warning: {w}")?;
            }
            if let Some(f) = &cmp.factors {
                writeln!(
                    stdout,
                    "gamma_hat = {:.6}, gamma_tilde = {:.6}, coupling = {:.6}",
                    f.gamma_hat, f.gamma_tilde, f.coupling
                )?;
            }
            if let Some(r) = cmp.worst_ratio_x() {
                writeln!(stdout, "max empirical/bound (X): {r:.4}")?;
            }
            writeln!(stdout, "overlay: {}", cfg.output_dir().join("bounds.csv").display())?;
        }
        Command::Surfaces { which, m, q, out } => {
            let out = out.unwrap_or_else(default_out);
            let list = match which {
                Some(s) => vec![s],
                None => vec![Surface::Surface1, Surface::Surface2],
            };
            for s in list {
                let sample = surface_samples(s, m, q)?;
                let name = match s {
                    Surface::Surface1 => "surface1",
                    Surface::Surface2 => "surface2",
                };
                let path = out.join(format!("{name}_{m}x{q}.csv"));
                write_atomic(&path, sample.to_csv().as_bytes())?;
                writeln!(stdout, "{}", path.display())?;
            }
        }
    }
    Ok(())
}

/// Parse `argv` (program name first), run the subcommand and return the
/// process exit code: 0 on success, 2 for usage errors, 1 otherwise.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr();
    match exec(cli.command, &mut stdout, &mut stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "kmeq: error: {e}");
            match e {
                Error::Parameter(_) | Error::Parse(_) => 2,
                _ => 1,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn family_flags() {
        let args = FamilyArgs {
            family: Some(FamilyKind::Smatrix),
            m: Some(10),
            n: Some(4),
            p: Some(4),
            q: Some(10),
            sigma1: Some(10.0),
            sigma2: Some(0.1),
            ..Default::default()
        };
        match args.family().unwrap().unwrap() {
            Family::Smatrix { a, b } => {
                assert_eq!((a.rows, a.cols, a.rank), (10, 4, 4));
                assert_eq!((b.rows, b.cols, b.rank), (4, 10, 4));
            }
            other => panic!("{other:?}"),
        }
        let missing = FamilyArgs {
            family: Some(FamilyKind::Gaussian),
            m: Some(3),
            ..Default::default()
        };
        assert!(missing.family().is_err());
        assert!(FamilyArgs::default().family().unwrap().is_none());
    }
}
