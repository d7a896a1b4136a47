//! Seed handling.
//!
//! Every randomized routine takes its random source explicitly. Batch
//! routines that fan work out across threads draw one `u64` master seed from
//! the caller's source and derive per-chunk seeds with [`derive_seed`], so
//! results do not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used by front ends when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_2010_0000_0001;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer applied to `master + (index + 1) * golden gamma`.
///
/// Stable across versions and platforms; changing it changes every derived
/// stream.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
