//! Shared checks for the linear-algebra and partition property suites.
//!
//! The eigenvalue oracle is a plain cyclic Jacobi sweep on Gram matrices
//! formed entry by entry, independent of the SVD path in the library.

#![allow(dead_code, clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

use kmeq::linalg::{self, Matrix, RankTol};
use kmeq::partition::{row_random_partition, Partition};
use kmeq::rng::{stream, Rng, Stream};
use rand::Rng as _;
use rand_distr::StandardNormal;

pub type Check = Result<(), String>;

pub fn gaussian(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `M_U M_Uᵀ` for the rows in `idx`.
pub fn row_gram(m: &Matrix, idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter()
        .map(|&i| {
            idx.iter()
                .map(|&j| (0..m.cols()).map(|k| m[(i, k)] * m[(j, k)]).sum())
                .collect()
        })
        .collect()
}

/// `M_Vᵀ M_V` for the columns in `idx`.
pub fn col_gram(m: &Matrix, idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter()
        .map(|&i| {
            idx.iter()
                .map(|&j| (0..m.rows()).map(|k| m[(k, i)] * m[(k, j)]).sum())
                .collect()
        })
        .collect()
}

/// 50 seeded matrices up to 20×20: Gaussian, low-rank products, matrices
/// with zero rows and scaled copies.
pub fn penrose_corpus() -> Vec<Matrix> {
    let mut rng = stream(20240, Stream::Problem);
    let mut out = Vec::with_capacity(50);
    for k in 0..50 {
        let rows = rng.random_range(1..=20);
        let cols = rng.random_range(1..=20);
        let m = match k % 5 {
            0 | 1 => gaussian(rows, cols, &mut rng),
            2 => {
                let r = rng.random_range(1..=rows.min(cols));
                let l = gaussian(rows, r, &mut rng);
                let rt = gaussian(r, cols, &mut rng);
                l.matmul(&rt).unwrap()
            }
            3 => {
                let mut g = gaussian(rows, cols, &mut rng);
                for i in (0..rows).step_by(3) {
                    g.row_mut(i).iter_mut().for_each(|v| *v = 0.0);
                }
                g
            }
            _ => gaussian(rows, cols, &mut rng).scaled(10f64.powi(rng.random_range(-3..=3))),
        };
        out.push(m);
    }
    out
}

fn fro_diff(a: &Matrix, b: &Matrix) -> f64 {
    linalg::frobenius_distance(a, b)
}

pub fn check_penrose(m: &Matrix) -> Check {
    let p = linalg::pseudoinverse(m, RankTol::Auto).map_err(|e| e.to_string())?;
    let smax = linalg::svd(m).map_err(|e| e.to_string())?.sigma_max();
    // the pseudoinverse scales as 1/σ, so M† M M† = M† is checked relative to ‖M†‖
    let tol = 1e-8 * (1.0 + smax);
    let mp = m.matmul(&p).unwrap();
    let pm = p.matmul(m).unwrap();
    let checks = [
        ("M M† M = M", fro_diff(&mp.matmul(m).unwrap(), m), tol),
        (
            "M† M M† = M†",
            fro_diff(&pm.matmul(&p).unwrap(), &p),
            1e-8 * (1.0 + linalg::frobenius_norm(&p)),
        ),
        ("(M M†)ᵀ = M M†", fro_diff(&mp.transpose(), &mp), tol),
        ("(M† M)ᵀ = M† M", fro_diff(&pm.transpose(), &pm), tol),
    ];
    for (name, err, tol) in checks {
        if !(err <= tol) {
            return Err(format!("{name}: error {err:e} > {tol:e} for {:?}", m.shape()));
        }
    }
    Ok(())
}

pub fn check_svd(m: &Matrix) -> Check {
    let dec = linalg::svd(m).map_err(|e| e.to_string())?;
    let sv = &dec.singular_values;
    if sv.windows(2).any(|w| w[1] > w[0]) || sv.iter().any(|&s| s < 0.0) {
        return Err(format!("singular values not sorted nonnegative: {sv:?}"));
    }
    let err = fro_diff(&dec.reconstruct(), m);
    let tol = 1e-10 * dec.sigma_max().max(f64::MIN_POSITIVE);
    if err > tol {
        return Err(format!("reconstruction error {err:e} > {tol:e} for {:?}", m.shape()));
    }
    Ok(())
}

pub fn check_norm_inner(m: &Matrix) -> Check {
    let n = linalg::frobenius_norm(m);
    let ip = linalg::frobenius_inner(m, m).unwrap();
    if (n * n - ip).abs() > 1e-14 * ip.max(f64::MIN_POSITIVE) {
        return Err(format!("‖M‖² = {} but ⟨M, M⟩ = {ip}", n * n));
    }
    Ok(())
}

pub fn check_partition_shape(p: &Partition, m: usize, s: usize) -> Check {
    if p.len() != s || p.universe() != m {
        return Err(format!("{} blocks over [{}], wanted {s} over [{m}]", p.len(), p.universe()));
    }
    let mut seen = vec![false; m];
    for b in p.blocks() {
        if b.is_empty() {
            return Err("empty block".into());
        }
        for &i in b {
            if i >= m || std::mem::replace(&mut seen[i], true) {
                return Err(format!("index {i} repeated or out of range"));
            }
        }
        let (lo, hi) = (m / s, m.div_ceil(s));
        if b.len() < lo || b.len() > hi {
            return Err(format!("block size {} outside [{lo}, {hi}]", b.len()));
        }
    }
    if seen.iter().any(|v| !v) {
        return Err("union is not the full index set".into());
    }
    Ok(())
}

/// Row partitions with `m ≥ 4`, `s ≥ 2` change with the seed.
pub fn check_seed_sensitivity(m: usize, s: usize) -> Check {
    let draw = |seed| row_random_partition(m, s, &mut stream(seed, Stream::RowPartition)).unwrap();
    if draw(5) != draw(5) {
        return Err("same seed gave different partitions".into());
    }
    let differs = (0..10u64).any(|k| draw(2 * k) != draw(2 * k + 1));
    if !differs {
        return Err(format!("10 seed pairs gave identical partitions for m={m}, s={s}"));
    }
    Ok(())
}

/// Measured (α, β) bracket every block's Gram spectrum and are attained.
pub fn check_paving_oracle(a: &Matrix, part: &Partition, rows: bool) -> Check {
    let pav = if rows {
        kmeq::partition::row_paving_bounds(a, part)
    } else {
        kmeq::partition::col_paving_bounds(a, part)
    }
    .map_err(|e| e.to_string())?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for b in part.blocks() {
        let gram = if rows { row_gram(a, b) } else { col_gram(a, b) };
        let ev = jacobi_eigenvalues(gram);
        lo = lo.min(ev[0]);
        hi = hi.max(*ev.last().unwrap());
    }
    let tol = 1e-10 * hi.max(1.0);
    if (pav.alpha - lo).abs() > tol || (pav.beta - hi).abs() > tol {
        return Err(format!(
            "paving ({}, {}) vs oracle ({lo}, {hi})",
            pav.alpha, pav.beta
        ));
    }
    if !(pav.alpha > 0.0 && pav.alpha <= pav.beta && pav.max_cond_sq >= 1.0) {
        return Err(format!("invalid paving {pav:?}"));
    }
    Ok(())
}
