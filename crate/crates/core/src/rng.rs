//! Seeded random streams.
//!
//! Every random draw in the crate comes from ChaCha8 (`rand_chacha`), keyed by
//! a 64-bit experiment seed through `SeedableRng::seed_from_u64`. Independent
//! consumers of one seed (problem generation, partitions, block sampling) get
//! separate ChaCha streams of the same key, so adding draws to one never
//! shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Problem = 0,
    ProblemB = 1,
    RowPartition = 2,
    ColumnPartition = 3,
    Sampling = 4,
}

pub fn stream(seed: u64, which: Stream) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
