use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::bspline::{averaging_knots, bspline_collocation, chord_length_params, CUBIC};
use super::{triple_product, ProblemInstance, Provenance, SystemKind};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// The two sampled test surfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    /// `z = s³ − 3st²` over `0 ≤ s ≤ 2π`, `1/2 ≤ t ≤ 1`.
    Surface1,
    /// `z = (s − s³ − t⁵)·exp(−s² − t²)` over `−1 ≤ s, t ≤ 1`.
    Surface2,
}

impl Surface {
    pub fn s_range(self) -> (f64, f64) {
        match self {
            Surface::Surface1 => (0.0, 2.0 * PI),
            Surface::Surface2 => (-1.0, 1.0),
        }
    }

    pub fn t_range(self) -> (f64, f64) {
        match self {
            Surface::Surface1 => (0.5, 1.0),
            Surface::Surface2 => (-1.0, 1.0),
        }
    }

    pub fn z(self, s: f64, t: f64) -> f64 {
        match self {
            Surface::Surface1 => s.powi(3) - 3.0 * s * t * t,
            Surface::Surface2 => (s - s.powi(3) - t.powi(5)) * (-s * s - t * t).exp(),
        }
    }
}

impl std::str::FromStr for Surface {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "surface1" | "1" => Ok(Surface::Surface1),
            "surface2" | "2" => Ok(Surface::Surface2),
            other => Err(Error::Parse(format!("unknown surface {other:?}"))),
        }
    }
}

/// Uniform `m × q` grid of points `(x, y, z) = (s, t, z(s, t))`.
#[derive(Clone, Debug)]
pub struct SurfaceSample {
    pub surface: Surface,
    /// `m` values along the first grid axis.
    pub s: Vec<f64>,
    /// `q` values along the second grid axis.
    pub t: Vec<f64>,
    /// `z[(i, j)] = z(s_i, t_j)`.
    pub z: Matrix,
}

impl SurfaceSample {
    pub fn m(&self) -> usize {
        self.s.len()
    }

    pub fn q(&self) -> usize {
        self.t.len()
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 3] {
        [self.s[i], self.t[j], self.z[(i, j)]]
    }

    /// CSV with header `s,t,x,y,z`, one line per grid point, `s` outermost.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,t,x,y,z\n");
        for i in 0..self.m() {
            for j in 0..self.q() {
                let [x, y, z] = self.point(i, j);
                let _ = writeln!(out, "{},{},{x},{y},{z}", self.s[i], self.t[j]);
            }
        }
        out
    }
}

fn linspace((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

pub fn surface_samples(which: Surface, m: usize, q: usize) -> Result<SurfaceSample> {
    if m < 2 || q < 2 {
        return Err(Error::Parameter(format!("surface grid must be at least 2x2, got {m}x{q}")));
    }
    let s = linspace(which.s_range(), m);
    let t = linspace(which.t_range(), q);
    let z = Matrix::from_fn(m, q, |i, j| which.z(s[i], t[j]));
    Ok(SurfaceSample {
        surface: which,
        s,
        t,
        z,
    })
}

/// Chord-length parameters along each grid axis, averaged over the grid
/// lines running in that direction: `(ν₁ over i = 0..m, ν₂ over j = 0..q)`.
pub fn mean_chord_params(sample: &SurfaceSample) -> Result<(Vec<f64>, Vec<f64>)> {
    let (m, q) = (sample.m(), sample.q());
    let mut along_s = vec![0.0; m];
    for j in 0..q {
        let line: Vec<[f64; 3]> = (0..m).map(|i| sample.point(i, j)).collect();
        for (acc, v) in along_s.iter_mut().zip(chord_length_params(&line)?) {
            *acc += v / q as f64;
        }
    }
    let mut along_t = vec![0.0; q];
    for i in 0..m {
        let line: Vec<[f64; 3]> = (0..q).map(|j| sample.point(i, j)).collect();
        for (acc, v) in along_t.iter_mut().zip(chord_length_params(&line)?) {
            *acc += v / m as f64;
        }
    }
    // pin the ends against rounding in the running means
    along_s[0] = 0.0;
    along_s[m - 1] = 1.0;
    along_t[0] = 0.0;
    along_t[q - 1] = 1.0;
    Ok((along_s, along_t))
}

/// Cubic B-spline fit of an `m × q` surface sample with an `n × p` control
/// net: `A = N(ν₁)` (m×n), `Bᵀ = N(ν₂)` (q×p), `F` the z-grid, and
/// `X* = A†FB†`.
pub fn build_fitting_problem(
    which: Surface,
    m: usize,
    q: usize,
    n: usize,
    p: usize,
) -> Result<ProblemInstance> {
    if n > m || p > q {
        return Err(Error::Parameter(format!(
            "control net {n}x{p} larger than data grid {m}x{q}"
        )));
    }
    let sample = surface_samples(which, m, q)?;
    let (nu1, nu2) = mean_chord_params(&sample)?;
    let knots1 = averaging_knots(&nu1, n, CUBIC)?;
    let knots2 = averaging_knots(&nu2, p, CUBIC)?;
    let a = bspline_collocation(&nu1, &knots1, CUBIC)?;
    let b = bspline_collocation(&nu2, &knots2, CUBIC)?.transpose();
    let f = sample.z;

    let a_pinv = linalg::pseudoinverse(&a, linalg::RankTol::Auto)?;
    let b_pinv = linalg::pseudoinverse(&b, linalg::RankTol::Auto)?;
    let x_star = triple_product(&a_pinv, &f, &b_pinv);

    let surface_name = match which {
        Surface::Surface1 => "surface1",
        Surface::Surface2 => "surface2",
    };
    let prov = Provenance::new("bspline", None)
        .with("surface", surface_name)
        .with("m", m)
        .with("q", q)
        .with("n", n)
        .with("p", p);
    ProblemInstance::new(a, b, f, Some(x_star), SystemKind::LeastSquares, prov)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_formula_spot_values() {
        assert_eq!(Surface::Surface1.z(0.0, 1.0), 0.0);
        assert_eq!(Surface::Surface2.z(0.0, 0.0), 0.0);
        assert!((Surface::Surface1.z(2.0, 0.5) - (8.0 - 1.5)).abs() < 1e-15);
    }

    #[test]
    fn sample_grid_dimensions_and_corners() {
        let g = surface_samples(Surface::Surface1, 150, 150).unwrap();
        assert_eq!(g.z.shape(), (150, 150));
        assert_eq!(g.s[0], 0.0);
        assert_eq!(g.s[149], 2.0 * PI);
        assert_eq!(g.t[0], 0.5);
        assert_eq!(g.t[149], 1.0);
        assert!(g.z.is_finite());
        assert!(surface_samples(Surface::Surface2, 1, 4).is_err());
    }

    #[test]
    fn csv_export_has_one_line_per_point() {
        let g = surface_samples(Surface::Surface2, 3, 4).unwrap();
        let csv = g.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("s,t,x,y,z"));
        assert_eq!(lines.count(), 12);
    }

    #[test]
    fn mean_chord_params_are_monotone() {
        let g = surface_samples(Surface::Surface1, 40, 30).unwrap();
        let (u, v) = mean_chord_params(&g).unwrap();
        assert_eq!((u.len(), v.len()), (40, 30));
        assert!(u.windows(2).all(|w| w[1] > w[0]));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn fitting_problem_shapes() {
        let p = build_fitting_problem(Surface::Surface1, 150, 150, 50, 50).unwrap();
        assert_eq!(p.dims(), (150, 50, 50, 150));
        assert_eq!(p.f.shape(), (150, 150));
        assert_eq!(p.kind, SystemKind::LeastSquares);
        assert!(build_fitting_problem(Surface::Surface1, 10, 10, 11, 4).is_err());
    }

    #[test]
    fn square_fit_interpolates_exactly() {
        let p = build_fitting_problem(Surface::Surface2, 12, 10, 12, 10).unwrap();
        let rel = p.relative_residual().unwrap();
        assert!(rel < 1e-10, "interpolation residual {rel}");
    }

    #[test]
    fn fitting_is_linear_in_the_data() {
        let p = build_fitting_problem(Surface::Surface2, 30, 25, 10, 8).unwrap();
        let doubled = p.f.scaled(2.0);
        let scaled = ProblemInstance::new(
            p.a.clone(),
            p.b.clone(),
            doubled,
            None,
            SystemKind::LeastSquares,
            Provenance::default(),
        )
        .unwrap();
        let x2 = scaled.min_norm_solution().unwrap();
        let expected = p.x_star.as_ref().unwrap().scaled(2.0);
        assert!(linalg::frobenius_distance(&x2, &expected) < 1e-10 * linalg::frobenius_norm(&expected));
    }
}
