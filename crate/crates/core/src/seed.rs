//! Deterministic seed derivation for parallel Monte Carlo runs.
//!
//! A single master seed expands into a tree of substreams keyed by logical
//! coordinates (stage, point, drop, link, symbol). Every random draw in the
//! simulator is tied to such a coordinate path, so results are independent of
//! scheduling order and thread count. The generator family is ChaCha8.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stage tags for the first level below the master seed.
pub mod stage {
    pub const GEOMETRY: u64 = 1;
    pub const SHADOW: u64 = 2;
    pub const PILOT_ASSIGN: u64 = 3;
    pub const CHANNEL_INIT: u64 = 4;
    pub const PILOT_NOISE: u64 = 5;
    pub const INNOVATION: u64 = 6;
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A position in the seed tree. Copy-cheap; `child` never mutates in place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedPath {
    state: u64,
}

impl SeedPath {
    pub fn new(master_seed: u64) -> Self {
        SeedPath {
            state: splitmix64(master_seed),
        }
    }

    /// Derive the child stream for one coordinate (stage id, drop index, ...).
    #[must_use]
    pub fn child(self, tag: u64) -> Self {
        SeedPath {
            state: splitmix64(self.state ^ splitmix64(tag)),
        }
    }

    /// Instantiate the RNG for this node of the tree.
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.state)
    }

    pub fn raw(self) -> u64 {
        self.state
    }
}
