//! Seed derivation. Every randomised check draws from a ChaCha12 stream
//! derived from the single run seed and a task label, so reports are
//! reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// FNV-1a over the label, folded into the run seed.
pub fn derive_rng(seed: u64, label: &str) -> ChaCha12Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha12Rng::seed_from_u64(seed ^ h)
}
