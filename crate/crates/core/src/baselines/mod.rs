//! Comparison searchers sharing the criterion engine.

mod bpso;
mod ga;
mod ofr;

pub use bpso::{fly, run_bpso, sample_bits, sigmoid, BpsoConfig};
pub use ga::{evolve, run_ga, GaConfig};
pub use ofr::{run_ofr, run_ofr_err, OfrConfig, OfrSelection};
