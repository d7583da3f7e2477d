//! Deterministic random streams.
//!
//! Every consumer of randomness derives its own ChaCha8 stream from the run
//! seed plus a pair of coordinates (iteration and particle, trial block, table
//! cell...). Results therefore never depend on scheduling or on the order in
//! which independent units are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream keyed by `seed` and positioned on the ChaCha stream `(major, minor)`.
///
/// `minor` must fit in 32 bits; `major` in 32 bits as well.
pub fn stream(seed: u64, major: u64, minor: u64) -> StreamRng {
    debug_assert!(major <= u32::MAX as u64 && minor <= u32::MAX as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((major << 32) | minor);
    rng
}

/// Per-particle stream for one iteration of the walk.
pub fn particle_stream(seed: u64, iteration: usize, particle: usize) -> StreamRng {
    stream(seed, iteration as u64, particle as u64)
}
