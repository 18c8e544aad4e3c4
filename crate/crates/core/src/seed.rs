//! Reproducible per-chain random streams.
//!
//! Chain `i` of a run with master seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` with its stream counter set to `i`. Streams
//! are disjoint, so results depend only on `(s, i)` and never on the thread
//! that happens to execute a chain.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ChainRng = ChaCha8Rng;

pub fn chain_rng(master_seed: u64, chain_index: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(chain_index);
    rng
}
