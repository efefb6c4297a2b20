//! Seed derivation for reproducible, schedule-independent random streams.
//!
//! Every random draw in a simulation comes from a [`StreamRng`] seeded by a
//! [`Seed`] path such as `master / survey / user`. Because a stream depends
//! only on its path, running users or grid points in any order (or on any
//! number of threads) yields identical results.

use rand::SeedableRng;

pub type StreamRng = rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One step of the SplitMix64 generator applied to `x`.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the seed tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(u64);

impl Seed {
    pub const fn new(master: u64) -> Self {
        Seed(master)
    }

    pub const fn value(self) -> u64 {
        self.0
    }

    pub fn child(self, tag: u64) -> Seed {
        Seed(splitmix64(self.0 ^ splitmix64(tag)))
    }

    /// Derive along several tags at once, e.g. `[user, survey, counter]`.
    pub fn path(self, tags: &[u64]) -> Seed {
        tags.iter().fold(self, |s, &t| s.child(t))
    }

    pub fn rng(self) -> StreamRng {
        StreamRng::seed_from_u64(self.0)
    }
}

/// Stable tags that keep unrelated streams apart.
pub mod tag {
    pub const USER: u64 = 0x5553_4552;
    pub const SURVEY: u64 = 0x5355_5256;
    pub const RUN: u64 = 0x0052_554E;
    pub const GRID: u64 = 0x4752_4944;
    pub const DATA: u64 = 0x4441_5441;
    pub const PRIOR: u64 = 0x5052_494F;
    pub const ATTACK: u64 = 0x4154_4B52;
    pub const SYNTH: u64 = 0x5359_4E54;
    pub const STRUCTURE: u64 = 0x5354_5255;
}
