//! General sketch-and-project steps with constraint matrices `W` and search
//! matrices `Z`. The Kaczmarz updates are the special cases
//! `W₁ = I_{:,U}`, `Z₁ = A_{U,:}ᵀ` and `W₂ = I_{V,:}`, `Z₂ = B_{:,V}ᵀ`.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, RankTol};

/// `Y + Z₁ (W₁ᵀ A Z₁)† W₁ᵀ (F − A Y)`.
pub fn pg_iterate_y(y: &Matrix, a: &Matrix, f: &Matrix, w1: &Matrix, z1: &Matrix) -> Result<Matrix> {
    if w1.rows() != a.rows() || z1.rows() != a.cols() {
        return Err(Error::dim(
            "pg_iterate_y",
            format!(
                "W1 {:?}, Z1 {:?} for A {:?}",
                w1.shape(),
                z1.shape(),
                a.shape()
            ),
        ));
    }
    let residual = f.sub(&a.matmul(y)?)?;
    let projected = w1.transpose().matmul(&a.matmul(z1)?)?;
    let core = linalg::pseudoinverse(&projected, RankTol::Auto)?;
    let update = z1.matmul(&core)?.matmul(&w1.transpose().matmul(&residual)?)?;
    y.add(&update)
}

/// `X + (Y − X B) W₂ᵀ (Z₂ B W₂ᵀ)† Z₂`.
pub fn pg_iterate_x(x: &Matrix, b: &Matrix, y: &Matrix, w2: &Matrix, z2: &Matrix) -> Result<Matrix> {
    if w2.cols() != b.cols() || z2.cols() != b.rows() {
        return Err(Error::dim(
            "pg_iterate_x",
            format!(
                "W2 {:?}, Z2 {:?} for B {:?}",
                w2.shape(),
                z2.shape(),
                b.shape()
            ),
        ));
    }
    let residual = y.sub(&x.matmul(b)?)?;
    let w2t = w2.transpose();
    let projected = z2.matmul(&b.matmul(&w2t)?)?;
    let core = linalg::pseudoinverse(&projected, RankTol::Auto)?;
    let update = residual.matmul(&w2t)?.matmul(&core)?.matmul(z2)?;
    x.add(&update)
}
