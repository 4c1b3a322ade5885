//! Seeding helpers shared by the simulator, the ensemble runner and the
//! Monte-Carlo checks.
//!
//! Every random stream is a [`ChaCha8Rng`], which produces the same output
//! on every platform. Derived streams (replica `i` of an ensemble, chunk `i`
//! of a Monte-Carlo run) are seeded with [`derive_seed`], so other
//! implementations can reproduce them:
//!
//! ```text
//! splitmix64(x):
//!     z = x + 0x9E3779B97F4A7C15
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     return z ^ (z >> 31)
//! derive_seed(base, i) = splitmix64(base ^ splitmix64(i))
//! ```
//!
//! all arithmetic wrapping modulo 2^64. The resulting `u64` is fed to
//! `ChaCha8Rng::seed_from_u64`.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th independent stream derived from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
