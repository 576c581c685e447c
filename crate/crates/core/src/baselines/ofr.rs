//! Orthogonal forward regression ranked by the error reduction ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::narx::model::regressor_columns;
use crate::narx::{BicEvaluator, Dataset, ModelSet, StructureMask, TermSpec};
use crate::report::{ErrEntry, RunReport};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OfrConfig {
    /// Stop once the unexplained fraction of output energy drops below this.
    pub sigma: f64,
    pub max_terms: usize,
}

impl Default for OfrConfig {
    fn default() -> Self {
        Self { sigma: 0.01, max_terms: 60 }
    }
}

impl OfrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(Error::InvalidConfig(format!("threshold {} outside (0, 1)", self.sigma)));
        }
        if self.max_terms == 0 {
            return Err(Error::InvalidConfig("max_terms must be positive".into()));
        }
        Ok(())
    }
}

/// Selected terms in selection order with their error reduction ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct OfrSelection {
    pub mask: StructureMask,
    /// `(term index, ERR)` per step.
    pub steps: Vec<(usize, f64)>,
}

impl OfrSelection {
    pub fn err_sequence(&self, model_set: &ModelSet) -> Vec<ErrEntry> {
        let mut cumulative = 0.0;
        self.steps
            .iter()
            .map(|&(i, err)| {
                cumulative += err;
                ErrEntry { term: model_set.terms()[i].to_string(), err, cumulative }
            })
            .collect()
    }

    pub fn terms<'a>(&self, model_set: &'a ModelSet) -> Vec<&'a TermSpec> {
        self.steps.iter().map(|&(i, _)| &model_set.terms()[i]).collect()
    }
}

/// Greedy forward selection over the estimation segment with modified
/// Gram–Schmidt orthogonalization. Candidates whose orthogonalized column has
/// collapsed numerically are skipped.
pub fn run_ofr_err<T: Scalar>(dataset: &Dataset<T>, model_set: &ModelSet, config: &OfrConfig) -> Result<OfrSelection> {
    config.validate()?;
    let first = model_set.max_lag();
    if dataset.n_est() <= first {
        return Err(Error::InvalidSplit { n_est: dataset.n_est(), len: dataset.len() });
    }
    let all: Vec<&TermSpec> = model_set.terms().iter().collect();
    let mut w = regressor_columns(&all, dataset, first);
    let y = &dataset.y()[first..dataset.n_est()];
    let energy = dot(y, y);
    if !(energy > T::zero()) {
        return Err(Error::Degenerate("output has zero energy"));
    }
    let original: Vec<T> = w.iter().map(|c| dot(c, c)).collect();
    let tol = T::epsilon() * T::from_usize_lossy(y.len()) * T::lit(10.0);
    let mut available = vec![true; w.len()];
    let mut mask = StructureMask::zeros(w.len());
    let mut steps = Vec::new();
    let mut explained = 0.0;
    while steps.len() < config.max_terms {
        let mut best: Option<(usize, T)> = None;
        for j in 0..w.len() {
            if !available[j] {
                continue;
            }
            let ww = dot(&w[j], &w[j]);
            if !(ww > tol * original[j]) {
                available[j] = false;
                continue;
            }
            let g = dot(&w[j], y);
            let err = g * g / (ww * energy);
            if best.map_or(true, |(_, e)| err > e) {
                best = Some((j, err));
            }
        }
        let Some((k, err)) = best else { break };
        available[k] = false;
        mask.set(k, true);
        let err = err.to_f64_lossy();
        explained += err;
        steps.push((k, err));
        let wk = w[k].clone();
        let kk = dot(&wk, &wk);
        for j in 0..w.len() {
            if available[j] {
                let a = dot(&wk, &w[j]) / kk;
                for (x, &q) in w[j].iter_mut().zip(&wk) {
                    *x = *x - a * q;
                }
            }
        }
        if 1.0 - explained < config.sigma {
            break;
        }
    }
    Ok(OfrSelection { mask, steps })
}

/// OFR-ERR selection refitted by least squares and scored like the searchers.
pub fn run_ofr<T: Scalar>(dataset: &Dataset<T>, model_set: &ModelSet, config: &OfrConfig) -> Result<RunReport> {
    let selection = run_ofr_err(dataset, model_set, config)?;
    let evaluator = BicEvaluator::new(model_set, dataset)?;
    let config_json = serde_json::to_value(config).expect("config serializes");
    let mut report = RunReport::new("ofr-err", 0, config_json, selection.mask.clone(), Vec::new(), 0, &evaluator);
    report.err_sequence = Some(selection.err_sequence(model_set));
    Ok(report)
}
