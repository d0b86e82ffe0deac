use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Child generator for `key` under the run seed.
///
/// Streams are derived by hashing, so the draws for one key do not depend on
/// which other keys were visited or in what order.
pub fn keyed_rng(seed: u64, key: &[&str]) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(key_digest(seed, key))
}

/// 64-bit child seed for `key`, for APIs that take an integer seed.
pub fn keyed_seed(seed: u64, key: &[&str]) -> u64 {
    let d = key_digest(seed, key);
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

fn key_digest(seed: u64, key: &[&str]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for part in key {
        // length prefix keeps ["ab", "c"] and ["a", "bc"] apart
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    h.finalize().into()
}
