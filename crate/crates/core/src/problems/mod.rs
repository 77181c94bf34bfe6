//! Test-problem generators: Gaussian and prescribed-spectrum ("Smatrix")
//! coefficient matrices with a known solution, and B-spline surface fitting.

mod bspline;
mod surface;

use std::collections::BTreeMap;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rng::{self, Rng, Stream};

pub use bspline::{
    averaging_knots, bspline_basis_row, bspline_collocation, chord_length_params, CUBIC,
};
pub use surface::{build_fitting_problem, mean_chord_params, surface_samples, Surface, SurfaceSample};

/// Relative residual allowed for an instance built as `F = A X* B`.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Whether `F` lies exactly in the range of `X ↦ AXB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// `F = A X* B` for the stored `x_star`.
    Consistent,
    /// Data-fitting right-hand side; `x_star` is the minimum-norm
    /// least-squares solution `A†FB†`.
    LeastSquares,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub family: String,
    pub parameters: BTreeMap<String, Value>,
    pub seed: Option<u64>,
    /// Non-fatal remarks raised during generation.
    pub notes: Vec<String>,
}

impl Provenance {
    pub fn new(family: impl Into<String>, seed: Option<u64>) -> Self {
        Provenance {
            family: family.into(),
            seed,
            ..Default::default()
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}

/// `A X B = F` with `A: m×n`, `B: p×q`, `F: m×q`.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub a: Matrix,
    pub b: Matrix,
    pub f: Matrix,
    pub x_star: Option<Matrix>,
    pub kind: SystemKind,
    pub provenance: Provenance,
}

impl ProblemInstance {
    /// Checks the shape chain, and consistency when `kind` says so.
    pub fn new(
        a: Matrix,
        b: Matrix,
        f: Matrix,
        x_star: Option<Matrix>,
        kind: SystemKind,
        provenance: Provenance,
    ) -> Result<Self> {
        let (m, n) = a.shape();
        let (p, q) = b.shape();
        if f.shape() != (m, q) {
            return Err(Error::dim(
                "ProblemInstance",
                format!("F is {:?}, expected ({m}, {q})", f.shape()),
            ));
        }
        if let Some(x) = &x_star {
            if x.shape() != (n, p) {
                return Err(Error::dim(
                    "ProblemInstance",
                    format!("x_star is {:?}, expected ({n}, {p})", x.shape()),
                ));
            }
        }
        let inst = ProblemInstance {
            a,
            b,
            f,
            x_star,
            kind,
            provenance,
        };
        if kind == SystemKind::Consistent && inst.x_star.is_some() {
            let rel = inst.relative_residual().expect("x_star present");
            if rel > CONSISTENCY_TOL {
                return Err(Error::Domain(format!(
                    "instance marked consistent has relative residual {rel:e}"
                )));
            }
        }
        Ok(inst)
    }

    /// `(m, n, p, q)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.a.rows(), self.a.cols(), self.b.rows(), self.b.cols())
    }

    /// `‖A X* B − F‖_F / ‖F‖_F` (absolute when `F = 0`).
    pub fn relative_residual(&self) -> Option<f64> {
        let x = self.x_star.as_ref()?;
        let axb = triple_product(&self.a, x, &self.b);
        let r = linalg::frobenius_distance(&axb, &self.f);
        let fnorm = linalg::frobenius_norm(&self.f);
        Some(if fnorm > 0.0 { r / fnorm } else { r })
    }

    /// `A† F B†`, the minimum-Frobenius-norm (least-squares) solution.
    pub fn min_norm_solution(&self) -> Result<Matrix> {
        let a_pinv = linalg::pseudoinverse(&self.a, linalg::RankTol::Auto)?;
        let b_pinv = linalg::pseudoinverse(&self.b, linalg::RankTol::Auto)?;
        Ok(triple_product(&a_pinv, &self.f, &b_pinv))
    }
}

/// `L M R`, associating whichever way needs fewer flops.
pub(crate) fn triple_product(l: &Matrix, m: &Matrix, r: &Matrix) -> Matrix {
    let (a, b) = l.shape();
    let c = m.cols();
    let d = r.cols();
    let left_first = a * b * c + a * c * d;
    let right_first = b * c * d + a * b * d;
    if left_first <= right_first {
        l.matmul(m).and_then(|lm| lm.matmul(r))
    } else {
        m.matmul(r).and_then(|mr| l.matmul(&mr))
    }
    .expect("triple_product shapes")
}

pub(crate) fn gaussian_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// `F = A X* B` with `X*` defaulting to `ones(n, p)`.
pub fn make_consistent_instance(
    a: Matrix,
    b: Matrix,
    x_star: Option<Matrix>,
    provenance: Provenance,
) -> Result<ProblemInstance> {
    let (n, p) = (a.cols(), b.rows());
    let x = x_star.unwrap_or_else(|| Matrix::ones(n, p));
    if x.shape() != (n, p) {
        return Err(Error::dim(
            "make_consistent_instance",
            format!("x_star is {:?}, expected ({n}, {p})", x.shape()),
        ));
    }
    let f = triple_product(&a, &x, &b);
    ProblemInstance::new(a, b, f, Some(x), SystemKind::Consistent, provenance)
}

/// Standard-normal `A: m×n`, `B: p×q`, `X* = ones(n, p)`.
///
/// The thin-A / fat-B regime (`m ≥ n`, `q ≥ p`) is what the experiments use;
/// other shapes are generated but noted in the provenance.
pub fn gen_gaussian(m: usize, n: usize, p: usize, q: usize, seed: u64) -> Result<ProblemInstance> {
    if m == 0 || n == 0 || p == 0 || q == 0 {
        return Err(Error::Parameter("Gaussian dimensions must be positive".into()));
    }
    let mut prov = Provenance::new("gaussian", Some(seed))
        .with("m", m)
        .with("n", n)
        .with("p", p)
        .with("q", q);
    if m < n || q < p {
        prov.notes.push(format!(
            "outside the thin-A/fat-B regime: m={m}, n={n}, p={p}, q={q}"
        ));
    }
    let a = gaussian_matrix(m, n, &mut rng::stream(seed, Stream::Problem));
    let b = gaussian_matrix(p, q, &mut rng::stream(seed, Stream::ProblemB));
    make_consistent_instance(a, b, None, prov)
}

/// Parameters of `Smatrix(rows, cols, rank, sigma1, sigma2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmatrixSpec {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub sigma1: f64,
    pub sigma2: f64,
}

impl SmatrixSpec {
    pub fn validate(&self) -> Result<()> {
        if self.rank < 2 {
            return Err(Error::Parameter(format!(
                "Smatrix rank must be at least 2, got {}",
                self.rank
            )));
        }
        if self.rank > self.rows.min(self.cols) {
            return Err(Error::Parameter(format!(
                "Smatrix rank {} exceeds min({}, {})",
                self.rank, self.rows, self.cols
            )));
        }
        if !(self.sigma2 > 0.0 && self.sigma1 >= self.sigma2 && self.sigma1.is_finite()) {
            return Err(Error::Parameter(format!(
                "Smatrix needs sigma1 >= sigma2 > 0, got ({}, {})",
                self.sigma1, self.sigma2
            )));
        }
        Ok(())
    }

    pub fn generate(&self, rng: &mut Rng) -> Result<Matrix> {
        self.validate()?;
        let SmatrixSpec {
            rows,
            cols,
            rank: r,
            sigma1,
            sigma2,
        } = *self;
        let u = orthonormal_columns(rows, r, rng);
        let v = orthonormal_columns(cols, r, rng);
        let mut sigma: Vec<f64> = (0..r - 2).map(|_| rng.random_range(sigma2..=sigma1)).collect();
        sigma.push(sigma2);
        sigma.push(sigma1);
        let us = Matrix::from_fn(rows, r, |i, k| u[(i, k)] * sigma[k]);
        let mut out = Matrix::zeros(rows, cols);
        linalg::gemm(1.0, &us, linalg::Op::N, &v, linalg::Op::T, 0.0, &mut out);
        Ok(out)
    }
}

/// Standard-normal `rows × r` block with its columns orthonormalized (thin QR).
fn orthonormal_columns(rows: usize, r: usize, rng: &mut Rng) -> Matrix {
    let g = gaussian_matrix(rows, r, rng).to_nalgebra();
    Matrix::from_nalgebra(&g.qr().q())
}

/// `U Σ Vᵀ` with orthonormalized Gaussian `U: x1×r`, `V: x2×r`; the first
/// `r−2` singular values uniform in `[sigma2, sigma1]`, the last two pinned to
/// `sigma2` and `sigma1`.
pub fn gen_smatrix(x1: usize, x2: usize, r: usize, sigma1: f64, sigma2: f64, seed: u64) -> Result<Matrix> {
    SmatrixSpec {
        rows: x1,
        cols: x2,
        rank: r,
        sigma1,
        sigma2,
    }
    .generate(&mut rng::stream(seed, Stream::Problem))
}

/// Consistent instance with `A = Smatrix(a)`, `B = Smatrix(b)`, `X* = ones`.
pub fn smatrix_instance(a: SmatrixSpec, b: SmatrixSpec, seed: u64) -> Result<ProblemInstance> {
    let am = a.generate(&mut rng::stream(seed, Stream::Problem))?;
    let bm = b.generate(&mut rng::stream(seed, Stream::ProblemB))?;
    let spec_value = |s: &SmatrixSpec| serde_json::to_value(s).expect("plain struct");
    let prov = Provenance::new("smatrix", Some(seed))
        .with("a", spec_value(&a))
        .with("b", spec_value(&b));
    make_consistent_instance(am, bm, None, prov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd;

    #[test]
    fn gaussian_shapes_and_determinism() {
        let p = gen_gaussian(350, 210, 210, 350, 3).unwrap();
        assert_eq!(p.dims(), (350, 210, 210, 350));
        assert_eq!(p.f.shape(), (350, 350));
        assert!(p.provenance.notes.is_empty());

        let a = gen_gaussian(12, 4, 3, 9, 42).unwrap();
        let b = gen_gaussian(12, 4, 3, 9, 42).unwrap();
        assert_eq!(a.a, b.a);
        assert_eq!(a.b, b.b);
        assert_eq!(a.f, b.f);
        let c = gen_gaussian(12, 4, 3, 9, 43).unwrap();
        assert_ne!(a.a, c.a);
    }

    #[test]
    fn gaussian_scalar_core_is_rank_one() {
        let p = gen_gaussian(6, 1, 1, 5, 9).unwrap();
        let s = svd(&p.f).unwrap();
        let tol = 1e-12 * s.sigma_max();
        assert_eq!(s.rank(tol), 1);
    }

    #[test]
    fn gaussian_regime_violation_is_noted_not_rejected() {
        let p = gen_gaussian(3, 5, 2, 4, 1).unwrap();
        assert_eq!(p.provenance.notes.len(), 1);
    }

    #[test]
    fn smatrix_rank_two_has_exact_spectrum() {
        let m = gen_smatrix(12, 9, 2, 7.0, 0.5, 11).unwrap();
        let s = svd(&m).unwrap();
        assert!((s.singular_values[0] - 7.0).abs() < 1e-12);
        assert!((s.singular_values[1] - 0.5).abs() < 1e-12);
        assert!(s.singular_values[2] < 1e-12);
    }

    #[test]
    fn smatrix_equal_sigmas() {
        let m = gen_smatrix(10, 6, 4, 2.5, 2.5, 5).unwrap();
        let s = svd(&m).unwrap();
        for k in 0..4 {
            assert!((s.singular_values[k] - 2.5).abs() < 1e-12);
        }
        assert!(s.singular_values[4] < 1e-12);
    }

    #[test]
    fn smatrix_rejects_bad_parameters() {
        assert!(matches!(gen_smatrix(5, 5, 1, 1.0, 0.5, 0), Err(Error::Parameter(_))));
        assert!(gen_smatrix(5, 4, 5, 1.0, 0.5, 0).is_err());
        assert!(gen_smatrix(5, 4, 3, 0.5, 1.0, 0).is_err());
        assert!(gen_smatrix(5, 4, 3, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn consistent_instance_examples() {
        let p = make_consistent_instance(
            Matrix::identity(3),
            Matrix::identity(4),
            Some(Matrix::ones(3, 4)),
            Provenance::default(),
        )
        .unwrap();
        assert_eq!(p.f, Matrix::ones(3, 4));

        let p = make_consistent_instance(
            Matrix::identity(2),
            Matrix::identity(2),
            Some(Matrix::zeros(2, 2)),
            Provenance::default(),
        )
        .unwrap();
        assert_eq!(p.f, Matrix::zeros(2, 2));

        let bad = make_consistent_instance(
            Matrix::identity(2),
            Matrix::identity(3),
            Some(Matrix::ones(3, 3)),
            Provenance::default(),
        );
        assert!(matches!(bad, Err(Error::Dimension { .. })));
    }

    #[test]
    fn instance_rejects_inconsistent_claim() {
        let r = ProblemInstance::new(
            Matrix::identity(2),
            Matrix::identity(2),
            Matrix::ones(2, 2),
            Some(Matrix::zeros(2, 2)),
            SystemKind::Consistent,
            Provenance::default(),
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
