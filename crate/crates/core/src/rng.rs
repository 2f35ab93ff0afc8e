//! Seeded sub-stream derivation.
//!
//! Every sampling site in the toolkit draws from its own stream, derived
//! from the run seed plus a list of site labels (lemma, instance index,
//! purpose tag). Streams therefore do not depend on iteration order or on
//! how work is scheduled across threads, which is what makes generation
//! and evaluation reproducible byte-for-byte.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a deterministic RNG from a seed and a sequence of site labels.
///
/// The derivation hashes `(seed, labels...)` with SHA-256, so it is stable
/// across platforms and releases (unlike `DefaultHasher`).
pub fn stream(seed: u64, labels: &[&str]) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for label in labels {
        // Length-prefix each label so ("ab","c") and ("a","bc") differ.
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}
