//! Counter-based derivation of independent random streams.
//!
//! Every stream is a ChaCha8 generator keyed by the master seed; the 64-bit
//! stream id is a SplitMix64 mix of `(trial, lane)`. Streams therefore depend
//! only on their coordinates, never on the order in which they are consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Lane reserved for the residual field `δτ₀`.
pub const LANE_RESIDUAL: u64 = 0;

/// Lane of band `j` (bands start at 1).
pub fn band_lane(j: u32) -> u64 {
    1 + u64::from(j)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master`.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial.wrapping_add(0xA076_1D64_78BD_642F)))
}

/// Generator for `(seed, lane)`.
pub fn stream(seed: u64, lane: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(splitmix64(lane));
    rng
}
