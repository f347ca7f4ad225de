//! Seed streams.
//!
//! One root seed drives everything. Trial `i` draws from the ChaCha8 stream
//! keyed by the root seed with stream id `i`, so trials are reproducible and
//! independent of execution order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream id reserved for schedule choices; trials use ids below it.
const SCHEDULE_STREAM: u64 = u64::MAX;

pub fn trial_stream(root_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(trial);
    rng
}

/// Uniform index in `0..len` for time `n`, by random access into a dedicated stream.
pub fn indexed_choice(seed: u64, n: u64, len: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SCHEDULE_STREAM);
    rng.set_word_pos(u128::from(n) * 16);
    rng.random_range(0..len)
}
