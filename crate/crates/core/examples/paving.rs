//! Random partitions, their measured paving constants and the convergence
//! factors of each method for a range of block sizes.
//!
//!     cargo run --release --example paving

use kmeq::bounds::{cme_rk_factors, convergence_factors};
use kmeq::partition::{block_count_for_size, column_random_partition, row_paving_bounds, row_random_partition};
use kmeq::problems::gen_gaussian;
use kmeq::rng::{stream, Stream};

fn main() -> kmeq::error::Result<()> {
    let problem = gen_gaussian(200, 40, 40, 200, 11)?;

    let s = row_random_partition(10, 3, &mut stream(11, Stream::RowPartition))?;
    println!("a partition of 0..10 into 3 blocks:\n{}", s.to_lines());

    println!("{:>5} {:>4} {:>10} {:>10} {:>9} {:>9} {:>9}", "tau", "s", "alpha", "beta", "gamma_hat", "gamma_til", "grbk");
    for tau in [1, 5, 10, 20, 40, 100, 200] {
        let count = block_count_for_size(200, tau)?;
        let s = row_random_partition(200, count, &mut stream(11, Stream::RowPartition))?;
        let t = column_random_partition(200, count, &mut stream(11, Stream::ColumnPartition))?;
        let pav = row_paving_bounds(&problem.a, &s)?;
        let f = convergence_factors(&problem.a, &problem.b, &s, &t)?;
        println!(
            "{tau:>5} {count:>4} {:>10.3e} {:>10.3e} {:>9.5} {:>9.5} {:>9.5}",
            pav.alpha, pav.beta, f.gamma_hat, f.gamma_tilde, f.grbk_factor
        );
    }
    let (rho1, rho2) = cme_rk_factors(&problem.a, &problem.b)?;
    println!("single-row/column factors: rho1 {rho1:.6}, rho2 {rho2:.6}");
    Ok(())
}
