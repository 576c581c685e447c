//! Learning sets: what a particle can learn from an exemplar structure.

use crate::error::Result;
use crate::narx::StructureMask;

/// Two binary rows of length N_t: a cardinality one-hot and a term mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearningSet {
    cardinality: Vec<bool>,
    terms: StructureMask,
}

impl LearningSet {
    /// One-hot at cardinality `xi` (1-based). A zero cardinality maps to the first slot.
    fn new(xi: usize, terms: StructureMask) -> Self {
        let mut cardinality = vec![false; terms.len()];
        if !cardinality.is_empty() {
            cardinality[xi.max(1) - 1] = true;
        }
        Self { cardinality, terms }
    }

    pub fn zeros(len: usize) -> Self {
        Self { cardinality: vec![false; len], terms: StructureMask::zeros(len) }
    }

    pub fn cardinality_row(&self) -> &[bool] {
        &self.cardinality
    }

    pub fn term_row(&self) -> &StructureMask {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Learning set of `exemplar` relative to the particle at `position`: the
/// exemplar's cardinality, and the exemplar's terms the particle lacks.
pub fn extract_learning_set(exemplar: &StructureMask, position: &StructureMask) -> Result<LearningSet> {
    let terms = exemplar.and_not(position)?;
    Ok(LearningSet::new(exemplar.cardinality(), terms))
}

/// Self-learning set: the particle's own cardinality and terms.
pub fn extract_self_learning_set(position: &StructureMask) -> LearningSet {
    LearningSet::new(position.cardinality(), position.clone())
}
