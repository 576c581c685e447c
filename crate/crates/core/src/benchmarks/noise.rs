//! White-noise excitation and disturbance sequences.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Independent RNG stream `stream` of the generator seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Distribution of an i.i.d. sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WhiteNoise {
    /// Uniform on `[low, high]`.
    Uniform { low: f64, high: f64 },
    /// Normal with the given mean and variance.
    Gaussian { mean: f64, variance: f64 },
}

impl WhiteNoise {
    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        match *self {
            WhiteNoise::Uniform { low, high } => {
                if !(low < high) {
                    return Err(Error::InvalidConfig(format!("uniform bounds {low} >= {high}")));
                }
                Ok((0..n).map(|_| rng.gen_range(low..=high)).collect())
            }
            WhiteNoise::Gaussian { mean, variance } => {
                if !(variance >= 0.0) {
                    return Err(Error::InvalidConfig(format!("negative variance {variance}")));
                }
                let normal = Normal::new(mean, variance.sqrt())
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?;
                Ok((0..n).map(|_| normal.sample(rng)).collect())
            }
        }
    }
}

/// `n` i.i.d. samples uniform on `[a, b]`.
pub fn gen_white_uniform(n: usize, a: f64, b: f64, seed: u64) -> Result<Vec<f64>> {
    WhiteNoise::Uniform { low: a, high: b }.sample_with(n, &mut stream_rng(seed, 0))
}

/// `n` i.i.d. normal samples with the given mean and variance.
pub fn gen_white_gaussian(n: usize, mean: f64, variance: f64, seed: u64) -> Result<Vec<f64>> {
    WhiteNoise::Gaussian { mean, variance }.sample_with(n, &mut stream_rng(seed, 0))
}
