//! Dense row-major matrices and the handful of factorizations the solvers need.
//!
//! Products go through `matrixmultiply`'s blocked kernels; the SVD is
//! delegated to `nalgebra` and re-sorted so singular values are nonincreasing.
//! Everything else (norms, pseudoinverse, block extraction) is written here
//! against [`Matrix`].

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Row-major real matrix. All entries are finite when built through the
/// checked constructors.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            let row = self.row(r);
            let shown: Vec<String> = row.iter().take(8).map(|v| format!("{v:.6e}")).collect();
            let more = if self.cols > 8 { ", ..." } else { "" };
            writeln!(f, "  [{}{}]", shown.join(", "), more)?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 1.0)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Square diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dim(
                "Matrix::from_vec",
                format!("{} entries for a {rows}x{cols} matrix", data.len()),
            ));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::dim(
                    "Matrix::from_rows",
                    format!("row {i} has {} entries, expected {cols}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::dim(
                "matmul",
                format!("{:?} * {:?}", self.shape(), rhs.shape()),
            ));
        }
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        gemm(1.0, self, Op::N, rhs, Op::N, 0.0, &mut out);
        Ok(out)
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn sub(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, "sub", |a, b| a - b)
    }

    pub fn add(&self, rhs: &Matrix) -> Result<Matrix> {
        self.zip_with(rhs, "add", |a, b| a + b)
    }

    fn zip_with(&self, rhs: &Matrix, op: &'static str, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::dim(
                op,
                format!("{:?} vs {:?}", self.shape(), rhs.shape()),
            ));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self += c * rhs`; panics on shape mismatch.
    pub fn add_scaled_assign(&mut self, c: f64, rhs: &Matrix) {
        assert_eq!(self.shape(), rhs.shape(), "add_scaled_assign shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * b;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<f64>) -> Matrix {
        Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Whether an operand of [`gemm`] is used as stored or transposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    N,
    T,
}

/// `c = alpha * op(a) * op(b) + beta * c`.
///
/// Shapes are programming invariants here, so a mismatch panics.
pub fn gemm(alpha: f64, a: &Matrix, op_a: Op, b: &Matrix, op_b: Op, beta: f64, c: &mut Matrix) {
    let (m, k, rsa, csa) = match op_a {
        Op::N => (a.rows, a.cols, a.cols as isize, 1),
        Op::T => (a.cols, a.rows, 1, a.cols as isize),
    };
    let (kb, n, rsb, csb) = match op_b {
        Op::N => (b.rows, b.cols, b.cols as isize, 1),
        Op::T => (b.cols, b.rows, 1, b.cols as isize),
    };
    assert_eq!(k, kb, "gemm inner dimension mismatch");
    assert_eq!((m, n), c.shape(), "gemm output shape mismatch");
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        for v in c.data.iter_mut() {
            *v *= beta;
        }
        return;
    }
    // SAFETY: the dimensions and strides describe exactly the storage of the
    // three row-major buffers checked above, and `c` does not alias `a`/`b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr(),
            rsa,
            csa,
            b.data.as_ptr(),
            rsb,
            csb,
            beta,
            c.data.as_mut_ptr(),
            c.cols as isize,
            1,
        );
    }
}

pub fn frobenius_norm(m: &Matrix) -> f64 {
    frobenius_norm_sq(m).sqrt()
}

pub fn frobenius_norm_sq(m: &Matrix) -> f64 {
    kernels::dot(&m.data, &m.data)
}

/// `Tr(m1ᵀ m2)`, i.e. the entrywise dot product.
pub fn frobenius_inner(m1: &Matrix, m2: &Matrix) -> Result<f64> {
    if m1.shape() != m2.shape() {
        return Err(Error::dim(
            "frobenius_inner",
            format!("{:?} vs {:?}", m1.shape(), m2.shape()),
        ));
    }
    Ok(kernels::dot(&m1.data, &m2.data))
}

/// `||m1 - m2||_F` without allocating the difference.
pub fn frobenius_distance(m1: &Matrix, m2: &Matrix) -> f64 {
    assert_eq!(m1.shape(), m2.shape(), "frobenius_distance shape mismatch");
    kernels::dist_sq(&m1.data, &m2.data).sqrt()
}

/// Vector kernels for the single-row and single-column solvers.
///
/// Reductions keep eight partial sums in a fixed order, so the result is
/// the same with or without the AVX2 path.
pub mod kernels {
    const LANES: usize = 8;

    #[inline(always)]
    fn reduce(acc: [f64; LANES]) -> f64 {
        ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7]))
    }

    #[inline(always)]
    fn dot_generic(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        let mut acc = [0.0; LANES];
        let (xc, yc) = (x.chunks_exact(LANES), y.chunks_exact(LANES));
        let (xr, yr) = (xc.remainder(), yc.remainder());
        for (a, b) in xc.zip(yc) {
            for l in 0..LANES {
                acc[l] += a[l] * b[l];
            }
        }
        let mut s = reduce(acc);
        for (a, b) in xr.iter().zip(yr) {
            s += a * b;
        }
        s
    }

    #[inline(always)]
    fn dist_sq_generic(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len().min(y.len());
        let (x, y) = (&x[..n], &y[..n]);
        let mut acc = [0.0; LANES];
        let (xc, yc) = (x.chunks_exact(LANES), y.chunks_exact(LANES));
        let (xr, yr) = (xc.remainder(), yc.remainder());
        for (a, b) in xc.zip(yc) {
            for l in 0..LANES {
                let d = a[l] - b[l];
                acc[l] += d * d;
            }
        }
        let mut s = reduce(acc);
        for (a, b) in xr.iter().zip(yr) {
            s += (a - b) * (a - b);
        }
        s
    }

    #[inline(always)]
    fn axpy_generic(alpha: f64, x: &[f64], y: &mut [f64]) {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    }

    macro_rules! dispatch {
        ($name:ident, $avx:ident, $generic:ident, ($($arg:ident: $ty:ty),*) -> $ret:ty) => {
            #[cfg(target_arch = "x86_64")]
            #[target_feature(enable = "avx2")]
            fn $avx($($arg: $ty),*) -> $ret {
                $generic($($arg),*)
            }

            #[inline]
            pub fn $name($($arg: $ty),*) -> $ret {
                #[cfg(target_arch = "x86_64")]
                if std::arch::is_x86_feature_detected!("avx2") {
                    // SAFETY: the CPU supports the enabled feature.
                    return unsafe { $avx($($arg),*) };
                }
                $generic($($arg),*)
            }
        };
    }

    dispatch!(dot, dot_avx2, dot_generic, (x: &[f64], y: &[f64]) -> f64);
    dispatch!(dist_sq, dist_sq_avx2, dist_sq_generic, (x: &[f64], y: &[f64]) -> f64);
    dispatch!(axpy, axpy_avx2, axpy_generic, (alpha: f64, x: &[f64], y: &mut [f64]) -> ());

}

/// Thin singular value decomposition `M = U diag(σ) Vᵀ`.
#[derive(Clone, Debug)]
pub struct Svd {
    /// `rows × r` with orthonormal columns.
    pub left: Matrix,
    /// Nonincreasing, nonnegative; length `r = min(rows, cols)`.
    pub singular_values: Vec<f64>,
    /// `cols × r` with orthonormal columns (V, not Vᵀ).
    pub right: Matrix,
}

impl Svd {
    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    /// Singular values above `tol` are counted as nonzero.
    pub fn rank(&self, tol: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > tol).count()
    }

    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.left.clone();
        for i in 0..us.rows {
            for (v, s) in us.row_mut(i).iter_mut().zip(&self.singular_values) {
                *v *= s;
            }
        }
        let mut out = Matrix::zeros(self.left.rows, self.right.rows);
        gemm(1.0, &us, Op::N, &self.right, Op::T, 0.0, &mut out);
        out
    }
}

const SVD_MAX_SWEEPS: usize = 10_000;

pub fn svd(m: &Matrix) -> Result<Svd> {
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::dim("svd", format!("empty {}x{} matrix", m.rows, m.cols)));
    }
    let decomposition =
        nalgebra::linalg::SVD::try_new(m.to_nalgebra(), true, true, f64::EPSILON, SVD_MAX_SWEEPS)
            .ok_or_else(|| Error::NumericalFailure {
                rows: m.rows,
                cols: m.cols,
                cond_estimate: column_norm_ratio(m),
            })?;
    let u = decomposition.u.as_ref().expect("requested U");
    let v_t = decomposition.v_t.as_ref().expect("requested Vᵀ");
    let sigma = &decomposition.singular_values;

    let r = sigma.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));

    let left = Matrix::from_fn(m.rows, r, |i, k| u[(i, order[k])]);
    let right = Matrix::from_fn(m.cols, r, |j, k| v_t[(order[k], j)]);
    let singular_values = order.iter().map(|&k| sigma[k].max(0.0)).collect();
    Ok(Svd {
        left,
        singular_values,
        right,
    })
}

// Crude conditioning hint for error reports when the SVD itself failed.
fn column_norm_ratio(m: &Matrix) -> f64 {
    let norms: Vec<f64> = (0..m.cols)
        .map(|j| (0..m.rows).map(|i| m[(i, j)].powi(2)).sum::<f64>().sqrt())
        .collect();
    let max = norms.iter().cloned().fold(0.0, f64::max);
    let min = norms.iter().cloned().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min);
    max / min
}

/// Threshold below which a singular value is treated as zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum RankTol {
    /// `max(rows, cols) · ε · σ_max`.
    #[default]
    Auto,
    Absolute(f64),
}

impl RankTol {
    pub fn resolve(self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        match self {
            RankTol::Auto => rows.max(cols) as f64 * f64::EPSILON * sigma_max,
            RankTol::Absolute(t) => t,
        }
    }
}

/// Moore–Penrose pseudoinverse through the SVD. A zero matrix maps to the
/// zero matrix of transposed shape.
pub fn pseudoinverse(m: &Matrix, tol: RankTol) -> Result<Matrix> {
    let dec = svd(m)?;
    Ok(pseudoinverse_from_svd(&dec, m.rows, m.cols, tol))
}

pub(crate) fn pseudoinverse_from_svd(dec: &Svd, rows: usize, cols: usize, tol: RankTol) -> Matrix {
    let cutoff = tol.resolve(rows, cols, dec.sigma_max());
    let r = dec.rank(cutoff);
    // V_r diag(1/σ) U_rᵀ
    let v_scaled = Matrix::from_fn(cols, r, |j, k| dec.right[(j, k)] / dec.singular_values[k]);
    let u_r = Matrix::from_fn(rows, r, |i, k| dec.left[(i, k)]);
    let mut out = Matrix::zeros(cols, rows);
    gemm(1.0, &v_scaled, Op::N, &u_r, Op::T, 0.0, &mut out);
    out
}

/// `(σ_min, σ_max)` where `σ_min` is the smallest singular value above the
/// automatic rank tolerance.
pub fn extreme_singular_values(m: &Matrix) -> Result<(f64, f64)> {
    let dec = svd(m)?;
    extreme_from_svd(&dec, m.rows, m.cols)
}

pub(crate) fn extreme_from_svd(dec: &Svd, rows: usize, cols: usize) -> Result<(f64, f64)> {
    let sigma_max = dec.sigma_max();
    let cutoff = RankTol::Auto.resolve(rows, cols, sigma_max);
    let sigma_min = dec
        .singular_values
        .iter()
        .rev()
        .copied()
        .find(|&s| s > cutoff && s > 0.0)
        .ok_or_else(|| {
            Error::Domain(format!(
                "{rows}x{cols} matrix has no nonzero singular value"
            ))
        })?;
    Ok((sigma_min, sigma_max))
}

fn check_indices(indices: &[usize], bound: usize) -> Result<()> {
    let mut seen = vec![false; bound];
    for &i in indices {
        if i >= bound {
            return Err(Error::Index { index: i, bound });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::Parameter(format!("index {i} selected twice")));
        }
    }
    Ok(())
}

/// `M_{U,:}` with rows in the order given.
pub fn take_rows(m: &Matrix, rows: &[usize]) -> Result<Matrix> {
    check_indices(rows, m.rows)?;
    let mut data = Vec::with_capacity(rows.len() * m.cols);
    for &i in rows {
        data.extend_from_slice(m.row(i));
    }
    Ok(Matrix {
        rows: rows.len(),
        cols: m.cols,
        data,
    })
}

/// `M_{:,V}` with columns in the order given.
pub fn take_cols(m: &Matrix, cols: &[usize]) -> Result<Matrix> {
    check_indices(cols, m.cols)?;
    Ok(take_cols_unchecked(m, cols))
}

pub(crate) fn take_cols_unchecked(m: &Matrix, cols: &[usize]) -> Matrix {
    let mut data = Vec::with_capacity(m.rows * cols.len());
    for i in 0..m.rows {
        let row = m.row(i);
        data.extend(cols.iter().map(|&j| row[j]));
    }
    Matrix {
        rows: m.rows,
        cols: cols.len(),
        data,
    }
}

pub(crate) fn take_rows_unchecked(m: &Matrix, rows: &[usize]) -> Matrix {
    let mut data = Vec::with_capacity(rows.len() * m.cols);
    for &i in rows {
        data.extend_from_slice(m.row(i));
    }
    Matrix {
        rows: rows.len(),
        cols: m.cols,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn frobenius_norm_examples() {
        assert_eq!(frobenius_norm(&Matrix::zeros(3, 3)), 0.0);
        assert!(approx(frobenius_norm(&Matrix::identity(2)), 2f64.sqrt(), 1e-15));
        let m = Matrix::from_rows(&[[3.0, 4.0]]).unwrap();
        assert_eq!(frobenius_norm(&m), 5.0);
    }

    #[test]
    fn frobenius_inner_examples() {
        let i2 = Matrix::identity(2);
        assert_eq!(frobenius_inner(&i2, &i2).unwrap(), 2.0);
        let m = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(frobenius_inner(&m, &m).unwrap(), 30.0);
        let a = Matrix::from_rows(&[[1.0, 0.0]]).unwrap();
        let b = Matrix::from_rows(&[[0.0, 1.0]]).unwrap();
        assert_eq!(frobenius_inner(&a, &b).unwrap(), 0.0);
        assert!(matches!(
            frobenius_inner(&a, &i2),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn construction_rejects_non_finite_and_bad_length() {
        assert!(matches!(
            Matrix::from_vec(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            Matrix::from_vec(2, 2, vec![1.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn svd_diagonal_and_permutation() {
        let d = Matrix::from_diag(&[3.0, 1.0]);
        let s = svd(&d).unwrap();
        assert!(approx(s.singular_values[0], 3.0, 1e-14));
        assert!(approx(s.singular_values[1], 1.0, 1e-14));

        let p = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let s = svd(&p).unwrap();
        assert!(s.singular_values.iter().all(|&v| approx(v, 1.0, 1e-14)));

        let l = Matrix::from_diag(&[1.0, 3.0, 2.0]);
        let s = svd(&l).unwrap();
        assert_eq!(s.singular_values.len(), 3);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_rejects_empty() {
        assert!(svd(&Matrix::zeros(0, 3)).is_err());
    }

    #[test]
    fn pseudoinverse_diagonal_truncation() {
        let p = pseudoinverse(&Matrix::from_diag(&[2.0, 0.0]), RankTol::Auto).unwrap();
        assert!(approx(p[(0, 0)], 0.5, 1e-15));
        assert_eq!(p[(0, 1)], 0.0);
        assert_eq!(p[(1, 0)], 0.0);
        assert_eq!(p[(1, 1)], 0.0);
    }

    #[test]
    fn pseudoinverse_of_row_is_scaled_transpose() {
        let a = Matrix::from_rows(&[[1.0, 2.0, 2.0]]).unwrap();
        let p = pseudoinverse(&a, RankTol::Auto).unwrap();
        assert_eq!(p.shape(), (3, 1));
        for (k, expected) in [1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0].iter().enumerate() {
            assert!(approx(p[(k, 0)], *expected, 1e-15));
        }
    }

    #[test]
    fn pseudoinverse_of_zero_is_zero() {
        let p = pseudoinverse(&Matrix::zeros(2, 3), RankTol::Auto).unwrap();
        assert_eq!(p, Matrix::zeros(3, 2));
    }

    #[test]
    fn extreme_singular_values_examples() {
        let (lo, hi) = extreme_singular_values(&Matrix::identity(3)).unwrap();
        assert!(approx(lo, 1.0, 1e-14) && approx(hi, 1.0, 1e-14));
        let (lo, hi) = extreme_singular_values(&Matrix::from_diag(&[10.0, 0.1])).unwrap();
        assert!(approx(lo, 0.1, 1e-14) && approx(hi, 10.0, 1e-13));
        // smallest nonzero for rank-deficient input
        let (lo, _) = extreme_singular_values(&Matrix::from_diag(&[4.0, 0.0, 2.0])).unwrap();
        assert!(approx(lo, 2.0, 1e-14));
        assert!(matches!(
            extreme_singular_values(&Matrix::zeros(2, 2)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn block_extraction() {
        let i3 = Matrix::identity(3);
        let r = take_rows(&i3, &[0, 2]).unwrap();
        assert_eq!(
            r,
            Matrix::from_rows(&[[1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap()
        );
        let c = take_cols(&i3, &[1]).unwrap();
        assert_eq!(c, Matrix::from_rows(&[[0.0], [1.0], [0.0]]).unwrap());
        let m = Matrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64);
        assert_eq!(take_rows(&m, &[0, 1, 2, 3]).unwrap(), m);
        assert!(matches!(
            take_rows(&m, &[4]),
            Err(Error::Index { index: 4, bound: 4 })
        ));
        assert!(take_cols(&m, &[0, 0]).is_err());
    }

    #[test]
    fn gemm_transposes() {
        let a = Matrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64 + 0.5);
        let b = Matrix::from_fn(3, 4, |i, j| (i * j) as f64 - 1.0);
        let mut c = Matrix::zeros(2, 4);
        gemm(1.0, &a, Op::T, &b, Op::N, 0.0, &mut c);
        let expected = a.transpose().matmul(&b).unwrap();
        assert!(frobenius_distance(&c, &expected) < 1e-13);

        let mut d = Matrix::ones(3, 3);
        gemm(2.0, &a, Op::N, &a, Op::T, -1.0, &mut d);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..2).map(|k| a[(i, k)] * a[(j, k)]).sum();
                assert!(approx(d[(i, j)], 2.0 * dot - 1.0, 1e-12));
            }
        }
    }
}
