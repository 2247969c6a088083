//! Seeded pseudo-random number generation.
//!
//! Every random stream in the crate is a ChaCha8 generator seeded through
//! [`rand::SeedableRng::seed_from_u64`]. ChaCha8 is a fully specified
//! counter-based stream cipher, so a given seed yields the same stream on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for a sub-stream (`stream` labels its purpose).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer over the mixed pair
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
