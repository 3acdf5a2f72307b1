//! Deterministic random streams.
//!
//! Every randomized routine in this crate draws from a ChaCha8 stream seeded
//! through [`substream`]. ChaCha8 output is identical on every platform, so a
//! (seed, index) pair always replays the same stream. Distinct indices give
//! streams that behave independently, which lets parallel trials run in any
//! order and still match a sequential rerun.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. Bijective on u64, scrambles low-entropy input well.
fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of substream `index` from a master seed.
///
/// This is one SplitMix64 step evaluated at `seed + (index + 1) * GOLDEN`,
/// so nearby indices (0, 1, 2, ...) land in unrelated parts of the ChaCha
/// seed space. `substream(s, i)` never equals `s` in any systematic way and
/// may itself be split again, which is how per-trial work derives seeds for
/// its own stages.
pub fn substream(seed: u64, index: u64) -> u64 {
    mix(seed.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

/// A fresh ChaCha8 stream for the given seed.
pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
