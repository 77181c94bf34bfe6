//! Solve a consistent Gaussian AXB = F with ARBK and print the error trace.
//!
//!     cargo run --release --example solve_arbk

use kmeq::partition::{block_count_for_size, column_random_partition, row_random_partition};
use kmeq::problems::gen_gaussian;
use kmeq::rng::{stream, Stream};
use kmeq::solvers::{solve_arbk, SolveConfig};

fn main() -> kmeq::error::Result<()> {
    let seed = 7;
    let problem = gen_gaussian(300, 60, 60, 300, seed)?;

    // blocks of 30 rows of A and 30 columns of B
    let s = row_random_partition(300, block_count_for_size(300, 30)?, &mut stream(seed, Stream::RowPartition))?;
    let t = column_random_partition(300, block_count_for_size(300, 30)?, &mut stream(seed, Stream::ColumnPartition))?;

    let config = SolveConfig {
        rse_tol: 1e-8,
        seed,
        trace_stride: 25,
        ..SolveConfig::default()
    };
    let report = solve_arbk(&problem, &s, &t, &config)?;
    print!("{}", report.trace_csv());
    println!(
        "{:?} after {} iterations, rse {:.3e}, {:.3}s (+{:.3}s setup)",
        report.termination, report.iterations, report.rse, report.elapsed_seconds, report.setup_seconds
    );
    Ok(())
}
