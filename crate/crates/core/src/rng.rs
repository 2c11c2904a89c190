//! Seeded randomness with a fixed, platform-independent recipe.
//!
//! Generators are `Xoshiro256PlusPlus` seeded through `seed_from_u64`
//! (SplitMix64 state expansion, increment `0x9E3779B97F4A7C15`). Floats take
//! the top 53 bits of one `u64`; indices use `Rng::gen_range`.

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

pub type SeededRng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> SeededRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Uniform in `[0, 1)`.
pub fn unit(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * INV_2_53
}

/// Uniform in the open interval `(0, 1)`.
pub fn open_unit(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * INV_2_53
}

/// Uniform in `[lo, hi)`.
pub fn uniform(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

pub fn index(rng: &mut impl Rng, upper_inclusive: usize) -> usize {
    rng.gen_range(0..=upper_inclusive)
}

/// Independent per-trial seeds derived from one base seed.
pub fn trial_seeds(base: u64, count: usize) -> Vec<u64> {
    let mut sm = SplitMix64::seed_from_u64(base);
    (0..count).map(|_| sm.next_u64()).collect()
}
