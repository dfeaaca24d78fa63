//! Deterministic seed derivation.
//!
//! Every randomized stage (generation, layout, k-means restarts, deformation
//! steps) gets its own RNG seeded through [`derive_seed`], so independent
//! stages never share a stream and reruns with the same master seed reproduce
//! byte-identical results regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step: hashes `state` into a well-mixed 64-bit value.
///
/// This is the standard finalizer (golden-ratio increment followed by two
/// xor-multiply rounds); it is bijective, so distinct inputs never collide.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent sub-seed from a master seed and a salt.
///
/// Different salts give decorrelated streams even for adjacent master seeds;
/// the same `(master, salt)` pair always gives the same seed.
pub fn derive_seed(master: u64, salt: u64) -> u64 {
    splitmix64(master ^ splitmix64(salt))
}

/// Build the crate's standard RNG from a master seed and a salt.
pub fn rng_from(master: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, salt))
}

/// Stable 64-bit hash of a name (FNV-1a), for turning dataset or layout
/// names into salts that do not depend on listing order.
pub fn hash_name(name: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for &b in name.as_bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix64_matches_reference_vectors() {
        // First outputs of the reference SplitMix64 generator seeded with 0 and 1.
        assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(1), 0x910A_2DEC_8902_5CC1);
    }

    #[test]
    fn derived_seeds_differ_by_salt() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        let c = derive_seed(43, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(42, 0));
    }
}
