//! Convergence factors and expected-error bounds.
//!
//! All bounds take the measured paving bounds of the partition actually in
//! use (see [`crate::partition::row_paving_bounds`]); `s` and `t` are the
//! block counts of those partitions.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::partition::{col_paving_bounds, row_paving_bounds, Partition, PavingBounds};

fn check_factor(g: f64) -> Result<f64> {
    if (0.0..1.0).contains(&g) {
        Ok(g)
    } else {
        Err(Error::PavingInconsistency { factor: g })
    }
}

fn sigma_min_sq(m: &Matrix) -> Result<f64> {
    let (lo, _) = linalg::extreme_singular_values(m)?;
    Ok(lo * lo)
}

/// `1 − σ_min² / (count·β)` from precomputed quantities.
pub fn block_factor(sigma_min_sq: f64, count: usize, beta: f64) -> Result<f64> {
    if count == 0 {
        return Err(Error::Parameter("block count must be at least 1".into()));
    }
    if !(beta > 0.0) || !(sigma_min_sq > 0.0) {
        return Err(Error::Domain(format!(
            "need positive σ_min² and β, got {sigma_min_sq} and {beta}"
        )));
    }
    check_factor(1.0 - sigma_min_sq / (count as f64 * beta))
}

/// `γ̂ = 1 − σ_min²(A)/(s·β_A)`: the Y-step contraction factor.
pub fn arbk_y_factor(a: &Matrix, s: usize, beta_a: f64) -> Result<f64> {
    block_factor(sigma_min_sq(a)?, s, beta_a)
}

/// `γ̃ = 1 − σ_min²(B)/(t·β_B)`: the X-step contraction factor.
pub fn arbk_x_factor(b: &Matrix, t: usize, beta_b: f64) -> Result<f64> {
    block_factor(sigma_min_sq(b)?, t, beta_b)
}

/// Neumaier-compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        if !self.sum.is_finite() {
            return self.sum;
        }
        self.sum + self.carry
    }
}

/// `g₂^{k+1} + c·Σ_{ℓ=0}^{k} g₁^{ℓ+1} g₂^{k−ℓ}`, the shape shared by the
/// ARBK and CME-RK X-error bounds (without the initial-error factor).
fn coupled_factor(k: usize, g1: f64, g2: f64, c: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for l in 0..=k {
        acc.add(g1.powi(l as i32 + 1) * g2.powi((k - l) as i32));
    }
    g2.powi(k as i32 + 1) + c * acc.value()
}

/// Inputs of the ARBK X-error bound for one pair of partitions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArbkBound {
    pub gamma_hat: f64,
    pub gamma_tilde: f64,
    /// `σ_max²(B)/(t·α_B)`.
    pub coupling: f64,
}

impl ArbkBound {
    pub fn new(gamma_hat: f64, gamma_tilde: f64, coupling: f64) -> Result<Self> {
        for (name, v) in [("gamma_hat", gamma_hat), ("gamma_tilde", gamma_tilde), ("coupling", coupling)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Parameter(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        Ok(ArbkBound {
            gamma_hat: check_factor(gamma_hat)?,
            gamma_tilde: check_factor(gamma_tilde)?,
            coupling,
        })
    }

    /// Factors for `A`, `B` under pavings with measured bounds.
    pub fn from_pavings(a: &Matrix, row: &PavingBounds, b: &Matrix, col: &PavingBounds) -> Result<Self> {
        let gamma_hat = block_factor(sigma_min_sq(a)?, row.block_count, row.beta)?;
        let (b_lo, b_hi) = linalg::extreme_singular_values(b)?;
        let gamma_tilde = block_factor(b_lo * b_lo, col.block_count, col.beta)?;
        if !(col.alpha > 0.0) {
            return Err(Error::Domain(format!("column paving α = {}", col.alpha)));
        }
        let coupling = b_hi * b_hi / (col.block_count as f64 * col.alpha);
        ArbkBound::new(gamma_hat, gamma_tilde, coupling)
    }

    /// Measure the pavings of `s` and `t` and build the factors.
    pub fn for_partitions(a: &Matrix, s: &Partition, b: &Matrix, t: &Partition) -> Result<Self> {
        ArbkBound::from_pavings(a, &row_paving_bounds(a, s)?, b, &col_paving_bounds(b, t)?)
    }

    /// `γ̄_k = 1 + c·Σ_{ℓ=0}^{k} (γ̂/γ̃)^{ℓ+1}`; infinite when `γ̃ = 0 < γ̂`.
    pub fn gamma_bar(&self, k: usize) -> f64 {
        if self.coupling == 0.0 || self.gamma_hat == 0.0 {
            return 1.0;
        }
        if self.gamma_tilde == 0.0 {
            return f64::INFINITY;
        }
        let r = self.gamma_hat / self.gamma_tilde;
        let mut acc = CompensatedSum::default();
        for l in 0..=k {
            acc.add(r.powi(l as i32 + 1));
        }
        1.0 + self.coupling * acc.value()
    }

    /// Bound on `E‖Y^{(k)} − Y*‖_F²`.
    pub fn y_error_bound(&self, k: usize, y0_err_sq: f64) -> Result<f64> {
        check_initial(y0_err_sq)?;
        Ok(self.gamma_hat.powi(k as i32) * y0_err_sq)
    }

    /// Bound on `E‖X^{(k+1)} − X*‖_F²`, i.e. `γ̄_k γ̃^{k+1} x0`, evaluated in
    /// the expanded form so that `γ̃ = 0` needs no special case.
    pub fn x_error_bound(&self, k: usize, x0_err_sq: f64) -> Result<f64> {
        check_initial(x0_err_sq)?;
        Ok(coupled_factor(k, self.gamma_hat, self.gamma_tilde, self.coupling) * x0_err_sq)
    }

    /// `(k, bound)` for `k = 0..=k_max`, `bound` on `E‖X^{(k+1)} − X*‖_F²`.
    pub fn x_error_curve(&self, k_max: usize, x0_err_sq: f64) -> Result<Vec<(usize, f64)>> {
        check_initial(x0_err_sq)?;
        Ok(coupled_curve(k_max, self.gamma_hat, self.gamma_tilde, self.coupling)
            .into_iter()
            .enumerate()
            .map(|(k, f)| (k, f * x0_err_sq))
            .collect())
    }
}

fn check_initial(e: f64) -> Result<()> {
    if e >= 0.0 && e.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("initial squared error must be nonnegative, got {e}")))
    }
}

/// `coupled_factor(k, …)` for all `k ≤ k_max` via `S_k = g₂·S_{k−1} + g₁^{k+1}`.
fn coupled_curve(k_max: usize, g1: f64, g2: f64, c: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut series = 0.0;
    let mut g1_pow = 1.0;
    let mut g2_pow = 1.0;
    for _ in 0..=k_max {
        g1_pow *= g1;
        g2_pow *= g2;
        series = g2 * series + g1_pow;
        out.push(g2_pow + c * series);
    }
    out
}

/// Free-function form of [`ArbkBound::x_error_bound`].
pub fn arbk_x_error_bound(k: usize, bound: &ArbkBound, x0_err_sq: f64) -> Result<f64> {
    bound.x_error_bound(k, x0_err_sq)
}

/// `(ρ₁, ρ₂) = (1 − σ_min²(A)/‖A‖_F², 1 − σ_min²(B)/‖B‖_F²)`.
pub fn cme_rk_factors(a: &Matrix, b: &Matrix) -> Result<(f64, f64)> {
    let rho = |m: &Matrix| -> Result<f64> {
        let fro = linalg::frobenius_norm_sq(m);
        if fro == 0.0 {
            return Err(Error::Domain("zero matrix".into()));
        }
        check_factor(1.0 - sigma_min_sq(m)? / fro)
    };
    Ok((rho(a)?, rho(b)?))
}

/// CME-RK counterpart of the X-error curve, with `c = σ_max²(B)/‖B‖_F²`.
/// Display only.
pub fn cme_rk_error_curve(a: &Matrix, b: &Matrix, k_max: usize, x0_err_sq: f64) -> Result<Vec<(usize, f64)>> {
    check_initial(x0_err_sq)?;
    let (rho1, rho2) = cme_rk_factors(a, b)?;
    let (_, b_hi) = linalg::extreme_singular_values(b)?;
    let c = b_hi * b_hi / linalg::frobenius_norm_sq(b);
    Ok(coupled_curve(k_max, rho1, rho2, c)
        .into_iter()
        .enumerate()
        .map(|(k, f)| (k, f * x0_err_sq))
        .collect())
}

/// `max_U σ_max(M_U)/‖M_U‖_F` over the blocks of a row or column partition.
fn beta_max(m: &Matrix, part: &Partition, rows: bool) -> Result<f64> {
    let label = if rows { "row" } else { "column" };
    let mut out = 0.0f64;
    for (i, idx) in part.blocks().iter().enumerate() {
        let block = if rows {
            linalg::take_rows(m, idx)?
        } else {
            linalg::take_cols(m, idx)?
        };
        let fro = linalg::frobenius_norm(&block);
        if fro == 0.0 {
            return Err(Error::Block {
                side: label,
                block: i,
                source: Box::new(Error::Domain("zero block".into())),
            });
        }
        let hi = linalg::svd(&block)?.sigma_max();
        out = out.max(hi / fro);
    }
    Ok(out)
}

/// `1 − [σ_min²(A)/(‖A‖_F² β_max²(A))]·[σ_min²(B)/(‖B‖_F² β_max²(B))]`.
pub fn grbk_factor(a: &Matrix, b: &Matrix, s: &Partition, t: &Partition) -> Result<f64> {
    let part = |m: &Matrix, p: &Partition, rows: bool| -> Result<f64> {
        let fro = linalg::frobenius_norm_sq(m);
        if fro == 0.0 {
            return Err(Error::Domain("zero matrix".into()));
        }
        let bm = beta_max(m, p, rows)?;
        Ok(sigma_min_sq(m)? / (fro * bm * bm))
    };
    check_factor(1.0 - part(a, s, true)? * part(b, t, false)?)
}

/// All factors for one problem and pair of partitions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceFactors {
    pub gamma_hat: f64,
    pub gamma_tilde: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub grbk_factor: f64,
}

pub fn convergence_factors(a: &Matrix, b: &Matrix, s: &Partition, t: &Partition) -> Result<ConvergenceFactors> {
    let arbk = ArbkBound::for_partitions(a, s, b, t)?;
    let (rho1, rho2) = cme_rk_factors(a, b)?;
    Ok(ConvergenceFactors {
        gamma_hat: arbk.gamma_hat,
        gamma_tilde: arbk.gamma_tilde,
        rho1,
        rho2,
        grbk_factor: grbk_factor(a, b, s, t)?,
    })
}

/// CSV with header `k,bound`.
pub fn bound_curve_csv(points: &[(usize, f64)]) -> String {
    let mut out = String::from("k,bound\n");
    for (k, v) in points {
        let _ = writeln!(out, "{k},{v:e}");
    }
    out
}
