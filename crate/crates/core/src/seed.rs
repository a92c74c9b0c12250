//! Seed derivation tree.
//!
//! Every random stream in a run is keyed by a path of integers below the
//! master seed, e.g. `[STAGE_SAMPLE, instance, strategy, c, srt]`. Each step
//! mixes the parent with the next path element through SplitMix64, so a
//! child seed depends only on its path and never on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const STAGE_CORPUS: u64 = 1;
pub const STAGE_EMBED: u64 = 2;
pub const STAGE_SRT: u64 = 3;
pub const STAGE_SAMPLE: u64 = 4;
pub const STAGE_DECODE: u64 = 5;
pub const STAGE_READ: u64 = 6;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `parent` along `path`.
pub fn derive(parent: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(parent), |acc, &step| splitmix64(acc ^ splitmix64(step)))
}

/// Stable 64-bit FNV-1a hash, used to key instances by their identifier.
pub fn hash_str(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derive_is_path_sensitive() {
        assert_eq!(derive(7, &[1, 2]), derive(7, &[1, 2]));
        assert_ne!(derive(7, &[1, 2]), derive(7, &[2, 1]));
        assert_ne!(derive(7, &[1]), derive(8, &[1]));
        assert_ne!(derive(7, &[]), derive(7, &[0]));
    }

    #[test]
    fn fnv_reference_value() {
        assert_eq!(hash_str(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(hash_str("a"), 0xaf63_dc4c_8601_ec8c);
    }
}
