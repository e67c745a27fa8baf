//! Seeded randomness for a single run.
//!
//! Every run owns exactly one [`SimRng`], a ChaCha8 stream seeded from the
//! run's 64-bit seed through `SeedableRng::seed_from_u64`. ChaCha output is
//! specified independently of the host, so traces are reproducible across
//! platforms.
//!
//! Draw order is fixed:
//!
//! 1. Deployment: for node ids `0..n`, one `x` draw then one `y` draw.
//! 2. Each round, cluster-head lotteries draw one uniform `[0, 1)` value per
//!    alive candidate in ascending node id. Layered protocols run their
//!    lotteries layer by layer, nearest clustered layer first; layers whose
//!    target saturates (every node becomes a head) or is zero draw nothing.
//!
//! Nothing else consumes randomness; all tie-breaks are deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SimRng(ChaCha8Rng);

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    /// Uniform draw in `[0, upper)`.
    pub fn uniform(&mut self, upper: f64) -> f64 {
        self.unit() * upper
    }
}
