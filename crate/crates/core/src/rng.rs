//! Seeded, order-independent randomness for replicate loops.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Environment variable capping the worker threads of replicate loops.
pub const THREADS_VAR: &str = "TOMTREE_THREADS";

/// The generator of replicate `index` under `seed`: one ChaCha stream per
/// index, so results do not depend on scheduling.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var(THREADS_VAR).ok().and_then(|v| v.parse::<usize>().ok()) {
            if n > 0 {
                b = b.num_threads(n);
            }
        }
        b.build().expect("thread pool")
    })
}

/// Runs `f(index, rng)` for every replicate in parallel; output is in index
/// order.
pub fn par_replicates<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> T + Sync,
{
    pool().install(|| {
        (0..n as u64)
            .into_par_iter()
            .map(|i| f(i, &mut replicate_rng(seed, i)))
            .collect()
    })
}
