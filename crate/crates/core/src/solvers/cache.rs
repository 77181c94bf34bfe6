use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, RankTol};
use crate::partition::Partition;

/// Row blocks `A_{U,:}` and column blocks `B_{:,V}` of a fixed pair of
/// partitions together with their pseudoinverses, computed once per solve.
#[derive(Clone, Debug)]
pub struct BlockCache {
    rows: Partition,
    cols: Partition,
    a_blocks: Vec<Matrix>,
    a_pinv: Vec<Matrix>,
    b_blocks: Vec<Matrix>,
    b_pinv: Vec<Matrix>,
    build_seconds: f64,
}

impl BlockCache {
    pub fn row_partition(&self) -> &Partition {
        &self.rows
    }

    pub fn col_partition(&self) -> &Partition {
        &self.cols
    }

    /// `A_{U,:}` for `U = S[i]`.
    pub fn a_block(&self, i: usize) -> &Matrix {
        &self.a_blocks[i]
    }

    /// `A_{U,:}†` for `U = S[i]`.
    pub fn a_pinv(&self, i: usize) -> &Matrix {
        &self.a_pinv[i]
    }

    /// `B_{:,V}` for `V = T[j]`.
    pub fn b_block(&self, j: usize) -> &Matrix {
        &self.b_blocks[j]
    }

    /// `B_{:,V}†` for `V = T[j]`.
    pub fn b_pinv(&self, j: usize) -> &Matrix {
        &self.b_pinv[j]
    }

    pub fn build_seconds(&self) -> f64 {
        self.build_seconds
    }
}

pub fn build_block_cache(a: &Matrix, s: &Partition, b: &Matrix, t: &Partition) -> Result<BlockCache> {
    if s.universe() != a.rows() {
        return Err(Error::dim(
            "build_block_cache",
            format!("row partition of [{}] for A with {} rows", s.universe(), a.rows()),
        ));
    }
    if t.universe() != b.cols() {
        return Err(Error::dim(
            "build_block_cache",
            format!("column partition of [{}] for B with {} columns", t.universe(), b.cols()),
        ));
    }
    let start = Instant::now();
    let a_blocks: Vec<Matrix> = s
        .blocks()
        .iter()
        .map(|u| linalg::take_rows_unchecked(a, u))
        .collect();
    let b_blocks: Vec<Matrix> = t
        .blocks()
        .iter()
        .map(|v| linalg::take_cols_unchecked(b, v))
        .collect();
    let pinv_all = |blocks: &[Matrix], side: &'static str| -> Result<Vec<Matrix>> {
        blocks
            .iter()
            .enumerate()
            .map(|(i, m)| {
                linalg::pseudoinverse(m, RankTol::Auto).map_err(|e| Error::Block {
                    side,
                    block: i,
                    source: Box::new(e),
                })
            })
            .collect()
    };
    let a_pinv = pinv_all(&a_blocks, "row")?;
    let b_pinv = pinv_all(&b_blocks, "column")?;
    Ok(BlockCache {
        rows: s.clone(),
        cols: t.clone(),
        a_blocks,
        a_pinv,
        b_blocks,
        b_pinv,
        build_seconds: start.elapsed().as_secs_f64(),
    })
}
