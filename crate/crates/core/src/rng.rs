//! The single random-number family used across simulation and learning.
//!
//! Every stream is a `ChaCha8Rng` seeded from a `u64`. Per-row and per-task
//! seeds are derived with a SplitMix64 finaliser so that a stream depends
//! only on its coordinates, never on the order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the stream at coordinates `parts` under `base`.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix(base), |acc, &p| splitmix(acc ^ splitmix(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let a = derive_seed(7, &[0, 1]);
        let b = derive_seed(7, &[1, 0]);
        let c = derive_seed(8, &[0, 1]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(7, &[0, 1]));
    }

    #[test]
    fn stream_is_reproducible() {
        let x: Vec<u32> = stream(42).random_iter().take(4).collect();
        let y: Vec<u32> = stream(42).random_iter().take(4).collect();
        assert_eq!(x, y);
    }
}
