//! Work-splitting abstraction for estimation campaigns.
//!
//! A campaign is a pure map from a block of sample indices to a vector of
//! integer counts plus an element-wise sum. Block boundaries depend only on
//! the total sample count, never on the number of workers, so any
//! [`BlockRunner`] implementation produces bit-identical totals.

use alloc::vec;
use alloc::vec::Vec;

/// Number of samples grouped into one unit of work.
pub const BLOCK_SAMPLES: u64 = 1024;

/// Splits `[0, total)` into fixed-size blocks and returns the half-open
/// index range of block `b`.
#[inline]
pub fn block_range(total: u64, b: u64) -> (u64, u64) {
    let lo = b * BLOCK_SAMPLES;
    (lo, (lo + BLOCK_SAMPLES).min(total))
}

/// Number of blocks covering `total` samples.
#[inline]
pub fn block_count(total: u64) -> u64 {
    total.div_ceil(BLOCK_SAMPLES)
}

/// Executes independent count-producing blocks and sums their outputs.
pub trait BlockRunner: Sync {
    /// Runs `f` for every block index in `0..blocks` and returns the
    /// element-wise sum of the produced vectors (all of length `width`).
    fn accumulate(&self, blocks: u64, width: usize, f: &(dyn Fn(u64) -> Vec<u64> + Sync))
        -> Vec<u64>;
}

/// Single-threaded reference runner.
pub struct SerialRunner;

impl BlockRunner for SerialRunner {
    fn accumulate(
        &self,
        blocks: u64,
        width: usize,
        f: &(dyn Fn(u64) -> Vec<u64> + Sync),
    ) -> Vec<u64> {
        let mut acc = vec![0u64; width];
        for b in 0..blocks {
            let part = f(b);
            debug_assert_eq!(part.len(), width);
            for (a, x) in acc.iter_mut().zip(part) {
                *a += x;
            }
        }
        acc
    }
}
