//! Structure search with a two-dimensional learning swarm.

mod learning;
mod upso;
mod velocity;

pub use learning::{extract_learning_set, extract_self_learning_set, LearningSet};
pub use upso::{run_search, run_upso, ParticleState, Swarm, SwarmConfig};
pub use velocity::{
    apply_velocity_update, compute_delta, position_from_draw, roulette_cardinality, top_terms, update_position,
    update_velocity, Exemplars, VelocityState, VelocityWeights,
};

use crate::error::Result;
use crate::narx::{ModelSet, StructureMask, TermSpec};

/// Terms whose bit is set, in model-set order.
pub fn decode_structure(mask: &StructureMask, model_set: &ModelSet) -> Result<Vec<TermSpec>> {
    model_set.select(mask)
}
