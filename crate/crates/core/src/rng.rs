//! Random streams.
//!
//! Every replicate draws from its own ChaCha8 stream: the master seed fixes
//! the key and the replicate index selects the stream number. Streams never
//! overlap, and replicate `r` sees the same numbers whichever worker runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent stream number `replicate` under `master_seed`.
pub fn replicate_rng(master_seed: u64, replicate: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replicate);
    rng
}

/// Worker count from `HAZARDLAB_THREADS`, falling back to the available parallelism.
pub fn worker_count() -> usize {
    std::env::var("HAZARDLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// A rayon pool capped at [`worker_count`] threads.
pub fn worker_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .expect("failed to build worker pool")
}
