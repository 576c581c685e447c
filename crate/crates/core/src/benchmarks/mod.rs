//! Seeded generators for every benchmark dataset.

pub mod noise;
pub mod oscillator;
pub mod systems;

pub use noise::{gen_white_gaussian, gen_white_uniform, WhiteNoise};
pub use oscillator::{integrate_oscillator, simulate_oscillator, OscillatorKind, OscillatorParams};
pub use systems::{simulate_s7, simulate_system, SystemId, SystemSpec, DEFAULT_ESTIMATION, DEFAULT_LENGTH};

use crate::error::Result;
use crate::narx::Dataset;

/// `n` samples of any benchmark system under its default settings.
pub fn generate(id: SystemId, n: usize, seed: u64) -> Result<Dataset<f64>> {
    let oscillator = |kind| simulate_oscillator(&OscillatorParams { n, ..OscillatorParams::new(kind) }, seed);
    match id {
        SystemId::S7 => simulate_s7(n, seed),
        SystemId::Duffing => oscillator(OscillatorKind::Duffing),
        SystemId::VanDerPol => oscillator(OscillatorKind::VanDerPol),
        _ => simulate_system(&SystemSpec::of(id), n, seed),
    }
}
