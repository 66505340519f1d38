//! Deterministic random streams.
//!
//! Every experiment draws from [`TrialRng`], ChaCha8 with a 64-bit seed.
//! The key is derived from the seed with `SeedableRng::seed_from_u64`, and
//! trial `i` uses ChaCha stream number `i`, so trial outputs do not depend on
//! how trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// The generator for trial `trial` of an experiment seeded with `seed`.
pub fn stream(seed: u64, trial: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A single generator for code paths that are not split into trials.
pub fn seeded(seed: u64) -> TrialRng {
    stream(seed, 0)
}
