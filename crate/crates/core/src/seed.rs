//! Reproducible RNG streams.
//!
//! Every random choice in the crate is drawn from a ChaCha stream whose seed
//! is derived from a master seed and a path of integers (reset index, round,
//! trial, ...), so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `path` into `master`; distinct paths give independent-looking seeds.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p.wrapping_add(0x5851_F42D))))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
