//! Search outcomes and the serializable per-run report.

use serde::{Deserialize, Serialize};

use crate::narx::{BicEvaluator, StructureMask};
use crate::scalar::Scalar;

/// Best-so-far state after one iteration (iteration 0 is the initial population).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iter: usize,
    #[serde(rename = "J")]
    pub criterion: f64,
    pub xi: usize,
}

/// Result of a population search over structure masks.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_mask: StructureMask,
    pub best_value: f64,
    pub trace: Vec<TraceEntry>,
    pub fes_used: usize,
}

/// One orthogonal forward-regression step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrEntry {
    pub term: String,
    pub err: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub best_mask: StructureMask,
    pub best_terms: Vec<String>,
    pub coefficients: Vec<f64>,
    #[serde(rename = "J")]
    pub criterion: f64,
    /// Free-run validation NMSE; absent when the structure cannot be fitted.
    pub nmse: Option<f64>,
    pub trace: Vec<TraceEntry>,
    pub fes_used: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err_sequence: Option<Vec<ErrEntry>>,
}

impl RunReport {
    /// Refits the chosen structure and records its coefficients, J and NMSE.
    pub fn new<T: Scalar>(
        algorithm: &str,
        seed: u64,
        config: serde_json::Value,
        best_mask: StructureMask,
        trace: Vec<TraceEntry>,
        fes_used: usize,
        evaluator: &BicEvaluator<'_, T>,
    ) -> Self {
        let best_terms = evaluator
            .model_set()
            .select(&best_mask)
            .map(|t| t.iter().map(ToString::to_string).collect())
            .unwrap_or_default();
        let (coefficients, criterion, nmse) = match evaluator.identify(&best_mask) {
            Ok(m) => (
                m.coefficients.iter().map(|c| c.to_f64_lossy()).collect(),
                m.criterion.to_f64_lossy(),
                Some(m.nmse.to_f64_lossy()).filter(|v| v.is_finite()),
            ),
            Err(_) => {
                let coefficients = evaluator
                    .fit(&best_mask)
                    .map(|ls| ls.coefficients.iter().map(|c| c.to_f64_lossy()).collect())
                    .unwrap_or_default();
                (coefficients, f64::MAX, None)
            }
        };
        Self {
            algorithm: algorithm.to_string(),
            seed,
            config,
            best_mask,
            best_terms,
            coefficients,
            criterion,
            nmse,
            trace,
            fes_used,
            err_sequence: None,
        }
    }

    pub fn from_outcome<T: Scalar>(
        algorithm: &str,
        seed: u64,
        config: serde_json::Value,
        outcome: SearchResult,
        evaluator: &BicEvaluator<'_, T>,
    ) -> Self {
        Self::new(algorithm, seed, config, outcome.best_mask, outcome.trace, outcome.fes_used, evaluator)
    }

    pub fn cardinality(&self) -> usize {
        self.best_mask.cardinality()
    }
}
