//! Shared test support: the example fixtures, seeded random model
//! generators, and brute-force oracles that the fast algorithms are
//! checked against.

pub mod fixtures;
pub mod gen;
pub mod oracle;

pub use rand_chacha::ChaCha8Rng as TestRng;

/// A deterministic generator for case number `seed`.
pub fn rng(seed: u64) -> TestRng {
    rand::SeedableRng::seed_from_u64(seed)
}
