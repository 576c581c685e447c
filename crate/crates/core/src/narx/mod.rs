//! NARX candidate terms, regression, free-run simulation and the BIC fitness.

pub mod bic;
pub mod data;
pub mod mask;
pub mod model;
pub mod term;

pub use bic::{bic_value, evaluate_bic, BicEvaluator, CountingFitness, FnFitness, Fitness};
pub use data::{read_csv, Dataset};
pub use mask::StructureMask;
pub use model::{compute_nmse, estimate_parameters, simulate_model, FreeRun, IdentifiedModel};
pub use term::{count_terms, ModelSet, TermSpec};
