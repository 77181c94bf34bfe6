//! Row/column random partitions and their paving bounds.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rng::Rng;

/// Ordered, disjoint, nonempty index blocks covering `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    universe: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(universe: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; universe];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::Parameter(format!("block {b} is empty")));
            }
            for &i in block {
                if i >= universe {
                    return Err(Error::Index { index: i, bound: universe });
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::Parameter(format!("index {i} appears in two blocks")));
                }
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Parameter(format!("index {missing} is not covered")));
        }
        Ok(Partition { universe, blocks })
    }

    /// The single block `{0, …, n−1}`.
    pub fn full(n: usize) -> Self {
        Partition {
            universe: n,
            blocks: vec![(0..n).collect()],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            universe: n,
            blocks: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// One line per block, comma-separated 1-based indices.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for block in &self.blocks {
            let line: Vec<String> = block.iter().map(|i| (i + 1).to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_lines(universe: usize, text: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let block = line
                .split(',')
                .map(|tok| {
                    let one_based: usize = tok
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad partition index {tok:?}")))?;
                    one_based
                        .checked_sub(1)
                        .ok_or_else(|| Error::Parse("partition indices are 1-based".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        Self::new(universe, blocks)
    }
}

/// Uniformly permute `0..n` (Fisher–Yates) and cut the permutation at
/// `⌊i·n/blocks⌋`, `i = 1..blocks`. Earlier blocks are the smaller ones when
/// `blocks` does not divide `n`.
fn random_partition(n: usize, blocks: usize, rng: &mut Rng) -> Result<Partition> {
    if blocks == 0 || blocks > n {
        return Err(Error::Parameter(format!(
            "cannot split {n} indices into {blocks} nonempty blocks"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let parts = (1..=blocks)
        .map(|i| {
            let lo = (i - 1) * n / blocks;
            let hi = i * n / blocks;
            perm[lo..hi].to_vec()
        })
        .collect();
    Ok(Partition {
        universe: n,
        blocks: parts,
    })
}

/// Row random partition of `[m]` into `s` blocks.
pub fn row_random_partition(m: usize, s: usize, rng: &mut Rng) -> Result<Partition> {
    random_partition(m, s, rng)
}

/// Column random partition of `[q]` into `t` blocks.
pub fn column_random_partition(q: usize, t: usize, rng: &mut Rng) -> Result<Partition> {
    random_partition(q, t, rng)
}

/// Number of blocks for a target block size `tau`: `⌈n/τ⌉`, so no block is
/// larger than `tau`.
pub fn block_count_for_size(n: usize, tau: usize) -> Result<usize> {
    if tau == 0 || tau > n {
        return Err(Error::Parameter(format!(
            "block size {tau} must lie in 1..={n}"
        )));
    }
    Ok(n.div_ceil(tau))
}

/// Draw one index uniformly from `0..n`.
pub(crate) fn uniform_index(n: usize, rng: &mut Rng) -> usize {
    rng.random_range(0..n)
}

/// Measured `(α, β)` for a partition of a matrix's rows or columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PavingBounds {
    pub alpha: f64,
    pub beta: f64,
    pub block_count: usize,
    /// `β / α`, a uniform bound on each block's squared condition number.
    pub max_cond_sq: f64,
    /// Some block Gram matrix was singular; `alpha` is then the smallest
    /// nonzero eigenvalue over all blocks.
    pub rank_deficient: bool,
}

#[derive(Clone, Copy)]
enum Side {
    Rows,
    Cols,
}

fn paving_bounds(m: &Matrix, part: &Partition, side: Side) -> Result<PavingBounds> {
    let (dim, label) = match side {
        Side::Rows => (m.rows(), "row"),
        Side::Cols => (m.cols(), "column"),
    };
    if part.universe() != dim {
        return Err(Error::dim(
            "paving_bounds",
            format!("{label} partition of [{}] for dimension {dim}", part.universe()),
        ));
    }
    let mut alpha = f64::INFINITY;
    let mut beta = 0.0f64;
    let mut rank_deficient = false;
    for (b, idx) in part.blocks().iter().enumerate() {
        let block = match side {
            Side::Rows => linalg::take_rows_unchecked(m, idx),
            Side::Cols => linalg::take_cols_unchecked(m, idx),
        };
        let annotate = |e| Error::Block {
            side: label,
            block: b,
            source: Box::new(e),
        };
        let dec = linalg::svd(&block).map_err(annotate)?;
        // Gram matrix is |block| × |block|; it is singular whenever the block
        // has fewer nonzero singular values than indices.
        let cutoff = linalg::RankTol::Auto.resolve(block.rows(), block.cols(), dec.sigma_max());
        if dec.rank(cutoff) < idx.len() {
            rank_deficient = true;
        }
        match linalg::extreme_from_svd(&dec, block.rows(), block.cols()) {
            Ok((lo, hi)) => {
                alpha = alpha.min(lo * lo);
                beta = beta.max(hi * hi);
            }
            // all-zero block
            Err(Error::Domain(_)) => rank_deficient = true,
            Err(e) => return Err(annotate(e)),
        }
    }
    if !alpha.is_finite() || beta <= 0.0 {
        return Err(Error::Domain(format!(
            "every {label} block of the matrix is zero"
        )));
    }
    Ok(PavingBounds {
        alpha,
        beta,
        block_count: part.len(),
        max_cond_sq: beta / alpha,
        rank_deficient,
    })
}

/// `α = min_U λ_min(A_U A_Uᵀ)`, `β = max_U λ_max(A_U A_Uᵀ)`.
pub fn row_paving_bounds(a: &Matrix, s: &Partition) -> Result<PavingBounds> {
    paving_bounds(a, s, Side::Rows)
}

/// `α = min_V λ_min(B_Vᵀ B_V)`, `β = max_V λ_max(B_Vᵀ B_V)`.
pub fn col_paving_bounds(b: &Matrix, t: &Partition) -> Result<PavingBounds> {
    paving_bounds(b, t, Side::Cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn rng(seed: u64) -> Rng {
        stream(seed, Stream::RowPartition)
    }

    #[test]
    fn floor_formula_block_sizes() {
        // k-ranges 1..=2 and 3..=5
        let p = row_random_partition(5, 2, &mut rng(1)).unwrap();
        assert_eq!(p.block_sizes(), vec![2, 3]);
        let p = column_random_partition(5, 2, &mut rng(2)).unwrap();
        assert_eq!(p.block_sizes(), vec![2, 3]);
        let p = row_random_partition(4, 4, &mut rng(3)).unwrap();
        assert_eq!(p.block_sizes(), vec![1; 4]);
        let p = column_random_partition(3, 3, &mut rng(3)).unwrap();
        assert_eq!(p.block_sizes(), vec![1; 3]);
        let p = row_random_partition(7, 1, &mut rng(4)).unwrap();
        let mut all = p.block(0).to_vec();
        all.sort_unstable();
        assert_eq!(all, (0..7).collect::<Vec<_>>());
        assert_eq!(column_random_partition(6, 1, &mut rng(5)).unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_block_counts() {
        assert!(matches!(
            row_random_partition(3, 4, &mut rng(0)),
            Err(Error::Parameter(_))
        ));
        assert!(row_random_partition(3, 0, &mut rng(0)).is_err());
        assert!(block_count_for_size(10, 11).is_err());
        assert_eq!(block_count_for_size(1000, 50).unwrap(), 20);
        assert_eq!(block_count_for_size(1000, 30).unwrap(), 34);
        assert_eq!(block_count_for_size(150, 50).unwrap(), 3);
    }

    #[test]
    fn new_validates_cover() {
        assert!(Partition::new(3, vec![vec![0, 1], vec![2]]).is_ok());
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
        assert!(Partition::new(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn serialization_is_one_based() {
        let p = Partition::new(4, vec![vec![2, 0], vec![1, 3]]).unwrap();
        assert_eq!(p.to_lines(), "3,1\n2,4\n");
        assert_eq!(Partition::from_lines(4, &p.to_lines()).unwrap(), p);
        assert!(Partition::from_lines(2, "0,1\n").is_err());
    }

    #[test]
    fn paving_of_identity_and_single_vectors() {
        let s = Partition::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let pb = row_paving_bounds(&Matrix::identity(4), &s).unwrap();
        assert!((pb.alpha - 1.0).abs() < 1e-14 && (pb.beta - 1.0).abs() < 1e-14);
        assert!(!pb.rank_deficient);
        let pb = col_paving_bounds(&Matrix::identity(4), &s).unwrap();
        assert!((pb.alpha - 1.0).abs() < 1e-14 && (pb.beta - 1.0).abs() < 1e-14);

        let row = Matrix::from_rows(&[[3.0, 4.0]]).unwrap();
        let pb = row_paving_bounds(&row, &Partition::singletons(1)).unwrap();
        assert!((pb.alpha - 25.0).abs() < 1e-12 && (pb.beta - 25.0).abs() < 1e-12);

        let col = Matrix::from_rows(&[[0.0], [2.0]]).unwrap();
        let pb = col_paving_bounds(&col, &Partition::singletons(1)).unwrap();
        assert!((pb.alpha - 4.0).abs() < 1e-12 && (pb.beta - 4.0).abs() < 1e-12);
        assert_eq!(pb.max_cond_sq, 1.0);
    }

    #[test]
    fn rank_deficient_block_is_flagged() {
        // rows 0 and 1 are parallel
        let a = Matrix::from_rows(&[[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]]).unwrap();
        let s = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let pb = row_paving_bounds(&a, &s).unwrap();
        assert!(pb.rank_deficient);
        assert!((pb.alpha - 1.0).abs() < 1e-12);
        assert!((pb.beta - 5.0).abs() < 1e-12);

        let z = Matrix::from_rows(&[[0.0, 0.0], [0.0, 3.0]]).unwrap();
        let pb = row_paving_bounds(&z, &Partition::singletons(2)).unwrap();
        assert!(pb.rank_deficient);
        assert!((pb.alpha - 9.0).abs() < 1e-12);
    }
}
