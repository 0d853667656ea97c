//! Reproducible random streams addressed by `(seed, stream)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A `(seed, stream)` address into the ChaCha8 keystream.
///
/// Equal addresses yield bit-identical generators; [`SeededSampler::child`]
/// derives independent addresses for parallel batches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededSampler {
    pub seed: u64,
    pub stream: u64,
}

impl SeededSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Address for batch `index` below this one.
    pub fn child(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(index.wrapping_add(1))),
        }
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
