//! Backward elimination of insignificant terms by coefficient t-tests.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::narx::{BicEvaluator, Dataset, IdentifiedModel, StructureMask};
use crate::scalar::Scalar;
use crate::validation::outcome::{classify_outcome, OutcomeTally};
use crate::report::RunReport;

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Two-sided p-value of each coefficient of the least-squares fit of `mask`.
pub fn coefficient_p_values<T: Scalar>(evaluator: &BicEvaluator<'_, T>, mask: &StructureMask) -> Result<Vec<f64>> {
    let ls = evaluator.fit(mask)?;
    let rows = ls.residuals.len();
    let p = ls.coefficients.len();
    if rows <= p {
        return Err(Error::Degenerate("no residual degrees of freedom"));
    }
    let dof = (rows - p) as f64;
    let sigma2 = ls.residual_sum_of_squares().to_f64_lossy() / dof;
    let dist = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    Ok(ls
        .coefficients
        .iter()
        .zip(ls.inverse_gram_diagonal())
        .map(|(c, g)| {
            let c = c.to_f64_lossy();
            let se = (sigma2 * g.to_f64_lossy()).sqrt();
            if se > 0.0 {
                2.0 * dist.sf((c / se).abs())
            } else if c != 0.0 {
                0.0
            } else {
                1.0
            }
        })
        .collect())
}

fn package<T: Scalar>(evaluator: &BicEvaluator<'_, T>, mask: StructureMask) -> Result<IdentifiedModel<T>> {
    match evaluator.identify(&mask) {
        Ok(m) => Ok(m),
        Err(Error::Diverged(_)) => {
            let ls = evaluator.fit(&mask)?;
            Ok(IdentifiedModel {
                model_set: evaluator.model_set().clone(),
                mask,
                coefficients: ls.coefficients,
                criterion: T::max_value(),
                nmse: T::max_value(),
            })
        }
        Err(e) => Err(e),
    }
}

/// Repeatedly drops the term with the largest p-value above `alpha` and refits,
/// keeping at least one term. J and NMSE are recomputed for the survivors.
pub fn prune_spurious<T: Scalar>(model: &IdentifiedModel<T>, dataset: &Dataset<T>, alpha: f64) -> Result<IdentifiedModel<T>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("significance level {alpha} outside (0, 1)")));
    }
    let evaluator = BicEvaluator::new(&model.model_set, dataset)?;
    prune_with(&evaluator, model.mask.clone(), alpha)
}

pub fn prune_with<T: Scalar>(evaluator: &BicEvaluator<'_, T>, mut mask: StructureMask, alpha: f64) -> Result<IdentifiedModel<T>> {
    while mask.cardinality() > 1 {
        let p = coefficient_p_values(evaluator, &mask)?;
        let (worst, p_max) = p
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
        if !(p_max > alpha) {
            break;
        }
        let term = mask.set_indices().nth(worst).expect("one p-value per term");
        mask.set(term, false);
    }
    package(evaluator, mask)
}

/// Prunes each run's best structure, classifies it against `truth` and tallies.
/// Structures that cannot be refitted are classified as found.
pub fn aggregate_outcomes<T: Scalar>(
    reports: &[RunReport],
    truth: &StructureMask,
    evaluator: &BicEvaluator<'_, T>,
    alpha: f64,
) -> Result<OutcomeTally> {
    if reports.is_empty() {
        return Err(Error::Degenerate("no run reports"));
    }
    let mut tally = OutcomeTally::default();
    for r in reports {
        let mask = match prune_with(evaluator, r.best_mask.clone(), alpha) {
            Ok(m) => m.mask,
            Err(_) => r.best_mask.clone(),
        };
        tally.add(classify_outcome(&mask, truth)?.kind);
    }
    Ok(tally)
}
