//! Stable seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a 64-bit
//! value. Child seeds are derived by hashing the parent seed together with
//! labels (cycle names, setting ids, fold numbers) so that results never
//! depend on scheduling order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// One component of a derived seed.
#[derive(Debug, Clone, Copy)]
pub enum SeedPart<'a> {
    U64(u64),
    Str(&'a str),
    Bytes(&'a [u8]),
}

impl From<u64> for SeedPart<'_> {
    fn from(v: u64) -> Self {
        SeedPart::U64(v)
    }
}

impl<'a> From<&'a str> for SeedPart<'a> {
    fn from(v: &'a str) -> Self {
        SeedPart::Str(v)
    }
}

impl<'a> From<&'a [u8]> for SeedPart<'a> {
    fn from(v: &'a [u8]) -> Self {
        SeedPart::Bytes(v)
    }
}

/// Hash a parent seed and a list of labels into a child seed.
pub fn derive_seed(parent: u64, parts: &[SeedPart<'_>]) -> u64 {
    let mut h = Sha256::new();
    h.update(b"gridsmith/seed/v1");
    h.update(parent.to_le_bytes());
    for part in parts {
        // tag + length prefix so ("ab","c") and ("a","bc") differ
        match part {
            SeedPart::U64(v) => {
                h.update([0u8]);
                h.update(v.to_le_bytes());
            }
            SeedPart::Str(s) => {
                h.update([1u8]);
                h.update((s.len() as u64).to_le_bytes());
                h.update(s.as_bytes());
            }
            SeedPart::Bytes(b) => {
                h.update([2u8]);
                h.update((b.len() as u64).to_le_bytes());
                h.update(b);
            }
        }
    }
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(out)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lower-case hex SHA-256 of a byte string.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}
