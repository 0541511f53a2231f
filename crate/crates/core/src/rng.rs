//! Seeding rules.
//!
//! Every random quantity is drawn from a ChaCha8 generator. A replication is
//! identified by a 64-bit seed; inside a replication each logical consumer
//! (capacities, edges, pair sampling, ...) reads its own ChaCha stream, selected
//! with [`ChaCha8Rng::set_stream`] using the fixed [`Stream`] discriminant.
//! Replication seeds are derived from a master seed by [`replication_seed`],
//! which folds the coordinates through the SplitMix64 finalizer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Logical random streams within one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    Capacities = 1,
    Edges = 2,
    Pairs = 3,
    Branching = 4,
    Selection = 5,
    RootVertex = 6,
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `mix64(mix64(mix64(mix64(master) ^ n) ^ gamma_index) ^ replication)`.
pub fn replication_seed(master: u64, n: u64, gamma_index: u64, replication: u64) -> u64 {
    let mut h = mix64(master);
    h = mix64(h ^ n);
    h = mix64(h ^ gamma_index);
    mix64(h ^ replication)
}

/// The generator for one logical stream of a replication seed.
pub fn stream(seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
