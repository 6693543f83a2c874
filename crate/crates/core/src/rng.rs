//! Seeded, counter-based random streams.
//!
//! Every consumer draws from a ChaCha8 keystream selected by `(seed, stream)`,
//! so replicate `r` of an experiment sees the same numbers regardless of how
//! replicates are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream tags keep independent consumers (edge generation, chains,
/// replicates) on disjoint keystreams for the same user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Edges = 1,
    Chain = 2,
    Replicate = 3,
    Enumeration = 4,
}

pub fn stream_rng(seed: u64, purpose: Purpose, index: u64) -> StreamRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
    key[16..24].copy_from_slice(b"tensorIs");
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
