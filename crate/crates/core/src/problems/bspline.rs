//! Chord-length parameters, averaged knot vectors and B-spline collocation.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const CUBIC: usize = 3;

/// Chord-length parameterization of an ordered point sequence: `t₀ = 0`,
/// `t_last = 1`, increments proportional to consecutive distances.
pub fn chord_length_params<P: AsRef<[f64]>>(points: &[P]) -> Result<Vec<f64>> {
    if points.len() < 2 {
        return Err(Error::Parameterization(format!(
            "need at least 2 points, got {}",
            points.len()
        )));
    }
    let chords: Vec<f64> = points
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].as_ref(), w[1].as_ref());
            assert_eq!(a.len(), b.len(), "points of different dimension");
            a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    if let Some(k) = chords.iter().position(|&d| d == 0.0) {
        return Err(Error::Parameterization(format!(
            "points {k} and {} coincide",
            k + 1
        )));
    }
    let total: f64 = chords.iter().sum();
    let mut params = Vec::with_capacity(points.len());
    let mut acc = 0.0;
    params.push(0.0);
    for d in &chords[..chords.len() - 1] {
        acc += d;
        params.push(acc / total);
    }
    params.push(1.0);
    Ok(params)
}

/// Clamped knot vector of length `n_ctrl + degree + 1` built by knot
/// averaging.
///
/// The parameters are first resampled to `n_ctrl` sites by linear
/// interpolation at fractional positions `i·(N−1)/(n_ctrl−1)`, `i = 0..n_ctrl`
/// (`N` = number of parameters); interior knot `j = 1..=n_ctrl−degree−1` is
/// then the mean of sites `j, …, j+degree−1`. With `n_ctrl = N` the
/// resampling is the identity and this is the classic interpolation averaging
/// rule; for uniform parameters the result is uniform and symmetric.
pub fn averaging_knots(params: &[f64], n_ctrl: usize, degree: usize) -> Result<Vec<f64>> {
    if n_ctrl < degree + 1 {
        return Err(Error::Parameter(format!(
            "{n_ctrl} control points cannot carry a degree-{degree} spline"
        )));
    }
    if n_ctrl > params.len() {
        return Err(Error::Parameter(format!(
            "under-determined fit: {n_ctrl} control points for {} parameters",
            params.len()
        )));
    }
    let n = params.len();
    let sites: Vec<f64> = if n_ctrl == 1 {
        vec![params[0]]
    } else {
        (0..n_ctrl)
            .map(|i| {
                let x = i as f64 * (n - 1) as f64 / (n_ctrl - 1) as f64;
                let lo = (x.floor() as usize).min(n - 1);
                let hi = (lo + 1).min(n - 1);
                let frac = x - lo as f64;
                (1.0 - frac) * params[lo] + frac * params[hi]
            })
            .collect()
    };

    let first = params[0];
    let last = params[n - 1];
    let mut knots = vec![first; degree + 1];
    for j in 1..n_ctrl - degree {
        let mean = sites[j..j + degree].iter().sum::<f64>() / degree as f64;
        knots.push(mean);
    }
    knots.extend(std::iter::repeat_n(last, degree + 1));
    debug_assert_eq!(knots.len(), n_ctrl + degree + 1);
    Ok(knots)
}

fn check_clamped(knots: &[f64], degree: usize) -> Result<()> {
    if knots.len() < 2 * (degree + 1) {
        return Err(Error::Evaluation(format!(
            "knot vector of length {} too short for degree {degree}",
            knots.len()
        )));
    }
    if knots.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Evaluation("knot vector is not nondecreasing".into()));
    }
    let n = knots.len();
    if knots[..=degree].iter().any(|&k| k != knots[0])
        || knots[n - degree - 1..].iter().any(|&k| k != knots[n - 1])
    {
        return Err(Error::Evaluation("knot vector is not clamped".into()));
    }
    if knots[0] == knots[n - 1] {
        return Err(Error::Evaluation("knot vector has an empty domain".into()));
    }
    Ok(())
}

/// Knot span `k` with `knots[k] <= t < knots[k+1]`; the right end of the
/// domain belongs to the last nonempty span.
fn find_span(knots: &[f64], degree: usize, t: f64) -> usize {
    let n_basis = knots.len() - degree - 1;
    if t >= knots[n_basis] {
        return n_basis - 1;
    }
    // upper_bound over the interior
    let mut lo = degree;
    let mut hi = n_basis;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if t < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Nonzero basis values `N_{span−degree..=span, degree}(t)` by the Cox–de
/// Boor triangle.
fn basis_funs(knots: &[f64], degree: usize, span: usize, t: f64) -> Vec<f64> {
    let mut values = vec![0.0; degree + 1];
    let mut left = vec![0.0; degree + 1];
    let mut right = vec![0.0; degree + 1];
    values[0] = 1.0;
    for j in 1..=degree {
        left[j] = t - knots[span + 1 - j];
        right[j] = knots[span + j] - t;
        let mut saved = 0.0;
        for r in 0..j {
            let denom = right[r + 1] + left[j - r];
            let temp = if denom == 0.0 { 0.0 } else { values[r] / denom };
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    values
}

/// Full row `(N_{0,d}(t), …, N_{n−1,d}(t))`.
pub fn bspline_basis_row(t: f64, knots: &[f64], degree: usize) -> Result<Vec<f64>> {
    check_clamped(knots, degree)?;
    basis_row_unchecked(t, knots, degree)
}

fn basis_row_unchecked(t: f64, knots: &[f64], degree: usize) -> Result<Vec<f64>> {
    let (lo, hi) = (knots[0], knots[knots.len() - 1]);
    if !(lo..=hi).contains(&t) {
        return Err(Error::Evaluation(format!(
            "parameter {t} outside knot span [{lo}, {hi}]"
        )));
    }
    let n_basis = knots.len() - degree - 1;
    let span = find_span(knots, degree, t);
    let mut row = vec![0.0; n_basis];
    for (r, v) in basis_funs(knots, degree, span, t).into_iter().enumerate() {
        row[span - degree + r] = v;
    }
    Ok(row)
}

/// Collocation matrix with entry `(i, j) = N_{j,degree}(params[i])`.
pub fn bspline_collocation(params: &[f64], knots: &[f64], degree: usize) -> Result<Matrix> {
    check_clamped(knots, degree)?;
    let n_basis = knots.len() - degree - 1;
    let mut data = Vec::with_capacity(params.len() * n_basis);
    for &t in params {
        data.extend(basis_row_unchecked(t, knots, degree)?);
    }
    Matrix::from_vec(params.len(), n_basis, data)
}
