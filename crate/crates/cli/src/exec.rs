//! Rayon-backed block runner. Block boundaries are fixed by the sample
//! count, so totals are bit-identical to a serial run for every pool size.

use perclab_core::runner::BlockRunner;
use rayon::prelude::*;

pub struct RayonRunner {
    pool: rayon::ThreadPool,
}

impl RayonRunner {
    pub fn new(workers: usize) -> anyhow::Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()?;
        Ok(RayonRunner { pool })
    }

    pub fn with_default_workers() -> anyhow::Result<Self> {
        let workers = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        Self::new(workers)
    }
}

impl BlockRunner for RayonRunner {
    fn accumulate(
        &self,
        blocks: u64,
        width: usize,
        f: &(dyn Fn(u64) -> Vec<u64> + Sync),
    ) -> Vec<u64> {
        self.pool.install(|| {
            (0..blocks)
                .into_par_iter()
                .fold(
                    || vec![0u64; width],
                    |mut acc, b| {
                        for (a, x) in acc.iter_mut().zip(f(b)) {
                            *a += x;
                        }
                        acc
                    },
                )
                .reduce(
                    || vec![0u64; width],
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                )
        })
    }
}
