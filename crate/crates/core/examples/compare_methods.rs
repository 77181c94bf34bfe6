//! Repeated-trial comparison of ARBK, GRBK and CME-RK on an ill-conditioned
//! Smatrix instance, as the `bench` subcommand runs it.
//!
//!     cargo run --release --example compare_methods

use kmeq::harness::{run_experiment, ExperimentConfig, Family};
use kmeq::problems::SmatrixSpec;

fn main() -> kmeq::error::Result<()> {
    let a = SmatrixSpec {
        rows: 200,
        cols: 40,
        rank: 40,
        sigma1: 10.0,
        sigma2: 0.5,
    };
    let b = SmatrixSpec {
        rows: 40,
        cols: 200,
        ..a
    };
    let methods = ["arbk:20:20", "arbk:10:10", "grbk:20:20", "cme_rk"]
        .iter()
        .map(|m| m.parse())
        .collect::<kmeq::error::Result<Vec<_>>>()?;
    let mut config = ExperimentConfig::new(Family::Smatrix { a, b }, methods);
    config.trials = 5;
    config.trace_stride = 50;
    config.output_dir = Some(std::env::temp_dir().join("kmeq_compare_methods"));

    let summary = run_experiment(&config)?;
    print!("{}", summary.render_table());
    println!();
    print!("{}", summary.summary_csv());
    println!("runs and traces in {}", summary.output_dir.display());
    Ok(())
}
