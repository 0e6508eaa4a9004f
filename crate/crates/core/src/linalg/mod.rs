//! Dense and sparse linear algebra used by the reservoir: seeded random
//! construction, spectral-radius estimation and the ridge-regression solve.

mod ridge;
mod sparse;
mod spectral;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

pub use ridge::{ridge_solve, RidgeAccumulator};
pub(crate) use sparse::random_sparse_stream;
pub use sparse::{random_sparse, SparseMatrix};
pub use spectral::{rescale_to_radius, spectral_radius, POWER_MAX_ITERS, POWER_TOL};

pub type DenseMatrix = nalgebra::DMatrix<f64>;
pub type DenseVector = nalgebra::DVector<f64>;

/// Root seed for every random quantity in a run.
///
/// Independent quantities draw from distinct ChaCha streams of the same
/// seed, so adding a new consumer never perturbs existing ones.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }

    /// An independent seed for a sub-experiment, identified by `salt`.
    pub fn derive(self, salt: u64) -> RngSeed {
        use rand::RngCore;
        RngSeed(self.rng(stream::DERIVE_BASE + salt).next_u64())
    }
}

impl From<u64> for RngSeed {
    fn from(v: u64) -> Self {
        RngSeed(v)
    }
}

/// Stream identifiers; fixed forever so that seeds stay meaningful.
pub mod stream {
    pub const RESERVOIR_INTERNAL: u64 = 1;
    pub const RESERVOIR_INPUT: u64 = 2;
    pub const POWER_START: u64 = 3;
    pub const POWER_RESTART: u64 = 4;
    /// `RngSeed::derive(salt)` uses `DERIVE_BASE + salt`.
    pub const DERIVE_BASE: u64 = 50;
    /// Noise channel `k` of a stochastic forcing uses `NOISE_BASE + k`.
    pub const NOISE_BASE: u64 = 100;
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
