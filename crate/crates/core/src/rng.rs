//! Seeded randomness.
//!
//! Every random draw comes from ChaCha8 seeded with a `u64`. Independent
//! trials use the stream for `seed ^ trial_index`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for trial `index` of an experiment seeded with `seed`.
pub fn trial(seed: u64, index: u64) -> Rng {
    seeded(seed ^ index)
}
