//! Replicate scheduling and counter-based random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// How replicate loops are executed.
///
/// Without the `parallel` feature both variants run sequentially. Results
/// are identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `(0..n).map(f).collect()`, in index order whatever the backend.
pub(crate) fn map_indexed<T, F>(exec: Execution, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Key for one experiment cell, derived from the user seed and a cell label.
pub(crate) fn cell_key(seed: u64, cell: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ cell.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Generator for replicate `i` of the cell with the given key.
pub(crate) fn replicate_rng(key: u64, i: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(i);
    rng
}
