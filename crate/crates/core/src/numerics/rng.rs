//! Reproducible random number streams.
//!
//! A [`RngStream`] is a value: the pair (seed, stream-id) fully determines the
//! draw sequence, and distinct stream-ids under the same seed are independent.
//! Parallel workers derive disjoint substreams instead of sharing state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier of a reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    seed: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// A sibling stream under the same seed.
    pub fn with_stream(&self, stream: u64) -> Self {
        Self { seed: self.seed, stream }
    }

    /// Instantiate the generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}
