use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{build_fitting_problem, gen_gaussian, smatrix_instance, ProblemInstance, SmatrixSpec, Surface};

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "KMEQ_OUT";
const FALLBACK_OUTPUT: &str = "kmeq_out";

/// Problem family and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Family {
    Gaussian {
        m: usize,
        n: usize,
        p: usize,
        q: usize,
    },
    Smatrix {
        a: SmatrixSpec,
        b: SmatrixSpec,
    },
    Bspline {
        surface: Surface,
        m: usize,
        q: usize,
        n: usize,
        p: usize,
    },
}

impl Family {
    /// `(m, n, p, q)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        match *self {
            Family::Gaussian { m, n, p, q } => (m, n, p, q),
            Family::Smatrix { a, b } => (a.rows, a.cols, b.rows, b.cols),
            Family::Bspline { m, q, n, p, .. } => (m, n, p, q),
        }
    }

    /// Random families are redrawn per trial unless the instance is fixed.
    pub fn is_random(&self) -> bool {
        !matches!(self, Family::Bspline { .. })
    }

    pub fn generate(&self, seed: u64) -> Result<ProblemInstance> {
        match *self {
            Family::Gaussian { m, n, p, q } => gen_gaussian(m, n, p, q, seed),
            Family::Smatrix { a, b } => smatrix_instance(a, b, seed),
            Family::Bspline { surface, m, q, n, p } => build_fitting_problem(surface, m, q, n, p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (m, n, p, q) = self.dims();
        if m == 0 || n == 0 || p == 0 || q == 0 {
            return Err(Error::Parameter(format!(
                "family dimensions must be positive, got m={m}, n={n}, p={p}, q={q}"
            )));
        }
        match self {
            Family::Smatrix { a, b } => {
                a.validate()?;
                b.validate()
            }
            Family::Bspline { .. } if n > m || p > q => Err(Error::Parameter(format!(
                "control net {n}x{p} larger than data grid {m}x{q}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Arbk,
    Grbk,
    CmeRk,
    Gradient,
}

impl MethodName {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodName::Arbk => "arbk",
            MethodName::Grbk => "grbk",
            MethodName::CmeRk => "cme_rk",
            MethodName::Gradient => "gradient",
        }
    }

    /// Whether the method works on row/column blocks.
    pub fn is_block(self) -> bool {
        matches!(self, MethodName::Arbk | MethodName::Grbk)
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "arbk" => Ok(MethodName::Arbk),
            "grbk" => Ok(MethodName::Grbk),
            "cme_rk" | "cmerk" => Ok(MethodName::CmeRk),
            "gradient" | "lspia" => Ok(MethodName::Gradient),
            other => Err(Error::Parse(format!(
                "unknown method {other:?} (expected arbk, grbk, cme_rk or gradient)"
            ))),
        }
    }
}

/// One method to run; block methods take block sizes `tau_a` (rows of `A`
/// per block) and `tau_b` (columns of `B` per block).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: MethodName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_a: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_b: Option<usize>,
    /// Fixed step for the gradient method; automatic when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
}

impl MethodSpec {
    pub fn new(name: MethodName, tau: Option<(usize, usize)>) -> Self {
        MethodSpec {
            name,
            tau_a: tau.map(|t| t.0),
            tau_b: tau.map(|t| t.1),
            step: None,
        }
    }

    /// File-name key such as `arbk_50_50` or `cme_rk`.
    pub fn key(&self) -> String {
        match (self.tau_a, self.tau_b) {
            (Some(a), Some(b)) => format!("{}_{a}_{b}", self.name),
            _ => self.name.to_string(),
        }
    }

    /// Display label such as `ARBK(50,50)`.
    pub fn label(&self) -> String {
        let base = match self.name {
            MethodName::Arbk => "ARBK",
            MethodName::Grbk => "GRBK",
            MethodName::CmeRk => "CME-RK",
            MethodName::Gradient => "Gradient",
        };
        match (self.tau_a, self.tau_b) {
            (Some(a), Some(b)) => format!("{base}({a},{b})"),
            _ => base.to_string(),
        }
    }

    pub fn validate(&self, dims: (usize, usize, usize, usize)) -> Result<()> {
        let (m, _, _, q) = dims;
        match (self.name.is_block(), self.tau_a, self.tau_b) {
            (true, Some(ta), Some(tb)) => {
                if ta == 0 || ta > m {
                    return Err(Error::Parameter(format!(
                        "{}: tau_a = {ta} outside 1..={m}",
                        self.label()
                    )));
                }
                if tb == 0 || tb > q {
                    return Err(Error::Parameter(format!(
                        "{}: tau_b = {tb} outside 1..={q}",
                        self.label()
                    )));
                }
            }
            (true, _, _) => {
                return Err(Error::Parameter(format!("{} needs both tau_a and tau_b", self.name)));
            }
            (false, None, None) => {}
            (false, _, _) => {
                return Err(Error::Parameter(format!("{} takes no block sizes", self.name)));
            }
        }
        if self.step.is_some() && self.name != MethodName::Gradient {
            return Err(Error::Parameter(format!("{} takes no step size", self.name)));
        }
        Ok(())
    }
}

/// `arbk:50:50`, `grbk:30:30`, `cme_rk`, `gradient` or `gradient:0.01`.
impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name: MethodName = parts.next().unwrap_or_default().trim().parse()?;
        let rest: Vec<&str> = parts.map(str::trim).collect();
        let num = |v: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Parse(format!("bad block size {v:?} in method {s:?}")))
        };
        let mut spec = MethodSpec::new(name, None);
        match (name, rest.as_slice()) {
            (MethodName::Arbk | MethodName::Grbk, [a, b]) => {
                spec.tau_a = Some(num(a)?);
                spec.tau_b = Some(num(b)?);
            }
            (MethodName::Gradient, [mu]) => {
                spec.step = Some(
                    mu.parse()
                        .map_err(|_| Error::Parse(format!("bad step size {mu:?} in method {s:?}")))?,
                );
            }
            (MethodName::CmeRk | MethodName::Gradient, []) => {}
            _ => {
                return Err(Error::Parse(format!(
                    "method {s:?}: expected name:tau_a:tau_b for block methods, bare name otherwise"
                )))
            }
        }
        Ok(spec)
    }
}

fn default_trials() -> usize {
    20
}

fn default_rse_tol() -> f64 {
    5e-2
}

fn default_max_iters() -> usize {
    100_000
}

fn default_stride() -> usize {
    1
}

fn default_bound_iters() -> usize {
    100
}

/// A repeated-trial experiment. Loads from JSON; absent fields take their
/// defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    pub methods: Vec<MethodSpec>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_rse_tol")]
    pub rse_tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Falls back to `$KMEQ_OUT`, then `./kmeq_out`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Keep the instance drawn from `base_seed` for every trial.
    #[serde(default)]
    pub fix_instance: bool,
    #[serde(default = "default_stride")]
    pub trace_stride: usize,
    /// Iterations tracked by the bound comparison.
    #[serde(default = "default_bound_iters")]
    pub bound_iters: usize,
}

impl ExperimentConfig {
    pub fn new(family: Family, methods: Vec<MethodSpec>) -> Self {
        ExperimentConfig {
            family,
            methods,
            trials: default_trials(),
            rse_tol: default_rse_tol(),
            max_iters: default_max_iters(),
            base_seed: 0,
            output_dir: None,
            fix_instance: false,
            trace_stride: default_stride(),
            bound_iters: default_bound_iters(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Parameter("no methods given".into()));
        }
        if !(self.rse_tol > 0.0) {
            return Err(Error::Parameter(format!("rse_tol must be positive, got {}", self.rse_tol)));
        }
        if self.max_iters == 0 || self.trace_stride == 0 {
            return Err(Error::Parameter("max_iters and trace_stride must be at least 1".into()));
        }
        let dims = self.family.dims();
        for m in &self.methods {
            m.validate(dims)?;
        }
        let mut keys: Vec<String> = self.methods.iter().map(MethodSpec::key).collect();
        keys.sort();
        if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Parameter(format!("method {} listed twice", w[0])));
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(FALLBACK_OUTPUT))
    }

    /// Seed of trial `i`.
    pub fn trial_seed(&self, i: usize) -> u64 {
        self.base_seed.wrapping_add(i as u64)
    }
}
