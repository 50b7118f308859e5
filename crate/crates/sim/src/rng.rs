//! Per-replicate random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Replicates handled by one rayon task.
pub const CHUNK: usize = 256;

/// The stream owned by replicate `replicate` under master seed `seed`.
pub fn stream(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Runs `f(i, rng_i)` for `i in 0..n` in parallel and returns the results in
/// replicate order.
pub fn replicate<R, F>(n: usize, seed: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> R + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let nested: Vec<Vec<R>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi)
                .map(|i| {
                    let mut rng = stream(seed, i as u64);
                    f(i, &mut rng)
                })
                .collect()
        })
        .collect();
    nested.into_iter().flatten().collect()
}

/// Folds replicates into one accumulator per chunk; the chunk accumulators
/// come back in order so the caller can merge them deterministically.
pub fn fold_chunks<A, I, F>(n: usize, seed: u64, init: I, f: F) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, usize, &mut ChaCha8Rng) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let lo = c * CHUNK;
            for i in lo..(lo + CHUNK).min(n) {
                let mut rng = stream(seed, i as u64);
                f(&mut acc, i, &mut rng);
            }
            acc
        })
        .collect()
}
