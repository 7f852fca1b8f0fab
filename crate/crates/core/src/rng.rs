//! Reproducible random number streams.
//!
//! Every worker owns a stream derived from `(master_seed, stream_id)`.
//! Streams with different ids are statistically independent, and the
//! same pair yields the same byte sequence on every platform, so runs
//! are reproducible regardless of how paths are distributed over
//! threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier of one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
}

/// Derive the stream for one worker or path.
pub fn derive_stream(master_seed: u64, stream_id: u64) -> RngStream {
    RngStream {
        master_seed,
        stream_id,
    }
}

impl RngStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Instantiate the generator for this stream.
    ///
    /// ChaCha keeps a 64-bit stream counter independent of the seed, so
    /// distinct `stream_id`s select disjoint keystream blocks of the
    /// same keyed cipher rather than reseeded generators.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}
