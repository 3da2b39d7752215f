//! Counter-based seed derivation.
//!
//! Every replicate draws from its own ChaCha8 stream whose seed is a pure
//! function of the master seed and the replicate's coordinates in the sweep
//! (mu index, TM index, repeat, replicate). Results therefore do not depend on
//! how replicates are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Master seed used when none is given.
pub const DEFAULT_MASTER_SEED: u64 = 1;

/// SplitMix64 finaliser.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of counters into `master`.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(master), |acc, &c| mix64(acc ^ mix64(c)))
}

/// Coordinates of one replicate inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StreamId {
    pub mu_index: u64,
    pub tm_index: u64,
    pub repeat: u64,
    pub replicate: u64,
}

impl StreamId {
    pub fn seed(&self, master: u64) -> u64 {
        derive(
            master,
            &[self.mu_index, self.tm_index, self.repeat, self.replicate],
        )
    }

    pub fn rng(&self, master: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed(master))
    }
}
