//! Least-squares tensor-product B-spline fit of a sampled surface: ARBK
//! against the gradient (LSPIA-style) iteration.
//!
//!     cargo run --release --example surface_fit [surface1|surface2]

use kmeq::harness::{run_method, MethodSpec};
use kmeq::problems::{build_fitting_problem, Surface};
use kmeq::solvers::{solve_gradient, SolveConfig, StepSize};

fn main() -> kmeq::error::Result<()> {
    let which: Surface = std::env::args().nth(1).as_deref().unwrap_or("surface1").parse()?;
    let (m, n) = (150, 50);
    let problem = build_fitting_problem(which, m, m, n, n)?;
    println!("data {m}x{m}, control net {n}x{n}");

    let config = SolveConfig {
        rse_tol: 5e-2,
        max_iters: 2000,
        ..SolveConfig::default()
    };
    let arbk: MethodSpec = "arbk:50:50".parse()?;
    let r = run_method(&problem, &arbk, 0, &config)?;
    println!("ARBK(50,50): {} iterations, rse {:.3e}", r.iterations, r.rse);

    let g = solve_gradient(&problem, StepSize::Auto, &config)?;
    println!("gradient:    {} iterations, rse {:.3e}", g.iterations, g.rse);

    if let Some(res) = problem.relative_residual() {
        println!("relative residual of the least-squares fit: {res:.3e}");
    }
    Ok(())
}
