mod common;

use common::*;
use kmeq::linalg::{self, Matrix};
use kmeq::partition::{column_random_partition, row_random_partition};
use kmeq::problems::gen_smatrix;
use kmeq::rng::{stream, Stream};
use proptest::prelude::*;

#[test]
fn jacobi_oracle_sanity() {
    let ev = jacobi_eigenvalues(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    let ev = jacobi_eigenvalues(vec![vec![4.0, 0.0, 0.0], vec![0.0, -1.0, 0.0], vec![0.0, 0.0, 2.5]]);
    assert_eq!(ev, vec![-1.0, 2.5, 4.0]);
}

#[test]
fn penrose_conditions_on_corpus() {
    let corpus = penrose_corpus();
    assert_eq!(corpus.len(), 50);
    for m in &corpus {
        check_penrose(m).unwrap();
        check_svd(m).unwrap();
        check_norm_inner(m).unwrap();
    }
}

#[test]
fn smatrix_extreme_values() {
    let a = gen_smatrix(100, 40, 40, 10.0, 0.1, 3).unwrap();
    let (lo, hi) = linalg::extreme_singular_values(&a).unwrap();
    assert!((lo - 0.1).abs() < 1e-8 && (hi - 10.0).abs() < 1e-8);
    // rank-deficient: smallest nonzero
    let a = gen_smatrix(30, 20, 7, 5.0, 0.5, 4).unwrap();
    let (lo, hi) = linalg::extreme_singular_values(&a).unwrap();
    assert!((lo - 0.5).abs() < 1e-8 && (hi - 5.0).abs() < 1e-8);
}

#[test]
fn paving_bounds_match_eigen_oracle() {
    let mut rng = stream(77, Stream::Problem);
    let a = gaussian(20, 10, &mut rng);
    let s = row_random_partition(20, 4, &mut stream(77, Stream::RowPartition)).unwrap();
    check_paving_oracle(&a, &s, true).unwrap();
    let b = gaussian(10, 20, &mut rng);
    let t = column_random_partition(20, 4, &mut stream(77, Stream::ColumnPartition)).unwrap();
    check_paving_oracle(&b, &t, false).unwrap();
}

#[test]
fn partitions_change_with_seed() {
    for (m, s) in [(4, 2), (10, 3), (50, 7), (200, 199)] {
        check_seed_sensitivity(m, s).unwrap();
    }
}

proptest! {
    #[test]
    fn random_partitions_are_balanced(m in 1usize..=200, frac in 0.0f64..1.0, seed: u64) {
        let s = 1 + ((m - 1) as f64 * frac) as usize;
        let p = row_random_partition(m, s, &mut stream(seed, Stream::RowPartition)).unwrap();
        prop_assert_eq!(check_partition_shape(&p, m, s), Ok(()));
        let p = column_random_partition(m, s, &mut stream(seed, Stream::ColumnPartition)).unwrap();
        prop_assert_eq!(check_partition_shape(&p, m, s), Ok(()));
    }

    #[test]
    fn paving_bounds_bracket_every_block(seed in 0u64..10_000, m in 2usize..40, cols in 2usize..12, s in 1usize..8) {
        let s = s.min(m);
        let mut rng = stream(seed, Stream::Problem);
        let a = gaussian(m, cols, &mut rng);
        let part = row_random_partition(m, s, &mut stream(seed, Stream::RowPartition)).unwrap();
        // full-rank blocks only: the oracle's λ_min is then the smallest nonzero
        prop_assume!(part.blocks().iter().all(|b| b.len() <= cols));
        prop_assert_eq!(check_paving_oracle(&a, &part, true), Ok(()));
        prop_assert_eq!(check_paving_oracle(&a.transpose(), &part, false), Ok(()));
    }

    #[test]
    fn pseudoinverse_of_random_shapes(seed in 0u64..100_000, rows in 1usize..=20, cols in 1usize..=20) {
        let m: Matrix = gaussian(rows, cols, &mut stream(seed, Stream::Problem));
        prop_assert_eq!(check_penrose(&m), Ok(()));
        prop_assert_eq!(check_svd(&m), Ok(()));
    }
}
