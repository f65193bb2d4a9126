//! Seeded generators and named fixtures shared by tests, the bench and the CLI suite.

pub mod actions;
pub mod chains;
pub mod control;
pub mod domination;
pub mod transfer;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
