//! NARX model structure selection with a two-dimensional unified particle swarm.

pub mod baselines;
pub mod benchmarks;
pub mod error;
pub mod linalg;
pub mod narx;
pub mod report;
pub mod scalar;
pub mod search;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Dataset = narx::Dataset<f64>;
pub type DatasetF32 = narx::Dataset<f32>;
pub type IdentifiedModel = narx::IdentifiedModel<f64>;
pub type IdentifiedModelF32 = narx::IdentifiedModel<f32>;
pub type BicEvaluator<'a> = narx::BicEvaluator<'a, f64>;
pub type BicEvaluatorF32<'a> = narx::BicEvaluator<'a, f32>;
