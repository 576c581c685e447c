//! Least-squares estimation, free-run simulation and error measures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, LeastSquares, Matrix};
use crate::narx::data::Dataset;
use crate::narx::mask::StructureMask;
use crate::narx::term::{ModelSet, TermSpec};
use crate::scalar::Scalar;

/// Multiplier of the scale-aware divergence bound `|ŷ| > 1e6·(1 + max|y|)`.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// A selected structure with its fitted coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifiedModel<T> {
    pub model_set: ModelSet,
    pub mask: StructureMask,
    /// One coefficient per set bit, in mask order.
    pub coefficients: Vec<T>,
    /// Criterion value J of the structure.
    pub criterion: T,
    /// Free-run NMSE on the validation segment.
    pub nmse: T,
}

impl<T: Scalar> IdentifiedModel<T> {
    pub fn terms(&self) -> Vec<TermSpec> {
        self.model_set.select(&self.mask).expect("mask sized to model set")
    }

    pub fn cardinality(&self) -> usize {
        self.mask.cardinality()
    }
}

/// Estimation-segment regression rows `max_lag..n_est` for the given terms.
pub(crate) fn regressor_columns<T: Scalar>(terms: &[&TermSpec], dataset: &Dataset<T>, first: usize) -> Vec<Vec<T>> {
    terms
        .iter()
        .map(|t| (first..dataset.n_est()).map(|k| t.evaluate_unchecked(dataset.u(), dataset.y(), k)).collect())
        .collect()
}

/// One-step-ahead least-squares fit over the estimation segment.
pub(crate) fn fit_terms<T: Scalar>(
    model_set: &ModelSet,
    mask: &StructureMask,
    dataset: &Dataset<T>,
) -> Result<LeastSquares<T>> {
    if mask.len() != model_set.len() {
        return Err(Error::LengthMismatch { expected: model_set.len(), actual: mask.len() });
    }
    if mask.cardinality() == 0 {
        return Err(Error::EmptyStructure);
    }
    let first = model_set.max_lag();
    if dataset.n_est() <= first {
        return Err(Error::InvalidSplit { n_est: dataset.n_est(), len: dataset.len() });
    }
    let terms: Vec<&TermSpec> = mask.set_indices().map(|i| &model_set.terms()[i]).collect();
    let columns = regressor_columns(&terms, dataset, first);
    let a = Matrix::from_columns(dataset.n_est() - first, &columns)?;
    least_squares(&a, &dataset.y()[first..dataset.n_est()])
}

/// Ordinary least-squares coefficients for the selected terms.
pub fn estimate_parameters<T: Scalar>(
    model_set: &ModelSet,
    mask: &StructureMask,
    dataset: &Dataset<T>,
) -> Result<Vec<T>> {
    fit_terms(model_set, mask, dataset).map(|ls| ls.coefficients)
}

/// Output of a free-run simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeRun<T> {
    /// Seed followed by simulated samples; truncated at the divergent sample.
    pub y_hat: Vec<T>,
    pub diverged: bool,
}

/// Feeds the model's own past outputs back: `ŷ(k) = Σ θᵢ xᵢ(u, ŷ, k)`.
///
/// `history` holds `ŷ` (or measured y) for samples `0..start`; samples `start..u.len()`
/// are simulated. Stops early once `|ŷ(k)| > bound`.
pub(crate) fn free_run<T: Scalar>(
    terms: &[&TermSpec],
    coefficients: &[T],
    u: &[T],
    history: &[T],
    start: usize,
    bound: T,
) -> FreeRun<T> {
    let mut y_hat = Vec::with_capacity(u.len());
    y_hat.extend_from_slice(&history[..start]);
    for k in start..u.len() {
        let mut v = T::zero();
        for (t, &c) in terms.iter().zip(coefficients) {
            v = v + c * t.evaluate_unchecked(u, &y_hat, k);
        }
        if !v.is_finite() || v.abs() > bound {
            return FreeRun { y_hat, diverged: true };
        }
        y_hat.push(v);
    }
    FreeRun { y_hat, diverged: false }
}

/// Divergence threshold for a record whose outputs peak at `max_abs_y`.
pub fn divergence_bound<T: Scalar>(max_abs_y: T) -> T {
    T::lit(DIVERGENCE_FACTOR) * (T::one() + max_abs_y)
}

/// Free-run simulation of `model` over the input `u`, seeded with `y_init`.
///
/// The returned sequence has the seed as its first `y_init.len()` samples. The seed
/// must cover the largest lag of the model set.
pub fn simulate_model<T: Scalar>(model: &IdentifiedModel<T>, u: &[T], y_init: &[T]) -> Result<FreeRun<T>> {
    let max_lag = model.model_set.max_lag();
    if y_init.len() < max_lag {
        return Err(Error::IndexOutOfRange { index: y_init.len(), lag: max_lag });
    }
    if y_init.len() > u.len() {
        return Err(Error::LengthMismatch { expected: u.len(), actual: y_init.len() });
    }
    if model.coefficients.len() != model.mask.cardinality() {
        return Err(Error::LengthMismatch { expected: model.mask.cardinality(), actual: model.coefficients.len() });
    }
    let terms: Vec<&TermSpec> = model.mask.set_indices().map(|i| &model.model_set.terms()[i]).collect();
    let scale = y_init.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    Ok(free_run(&terms, &model.coefficients, u, y_init, y_init.len(), divergence_bound(scale)))
}

/// `Σ(y − ŷ)² / Σ(y − ȳ)²`.
pub fn compute_nmse<T: Scalar>(y: &[T], y_hat: &[T]) -> Result<T> {
    if y.len() != y_hat.len() {
        return Err(Error::LengthMismatch { expected: y.len(), actual: y_hat.len() });
    }
    if y.len() < 2 {
        return Err(Error::Degenerate("NMSE needs at least two samples"));
    }
    let mean = y.iter().copied().sum::<T>() / T::from_usize_lossy(y.len());
    let den: T = y.iter().map(|&v| (v - mean).powi(2)).sum();
    if den == T::zero() {
        return Err(Error::Degenerate("NMSE of a constant output"));
    }
    let num: T = y.iter().zip(y_hat).map(|(&a, &b)| (a - b).powi(2)).sum();
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn arx_data(n: usize) -> Dataset<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut y = vec![0.0; n];
        for k in 1..n {
            y[k] = 0.5 * y[k - 1] + 0.3 * u[k - 1];
        }
        Dataset::split(u, y, n * 7 / 10).unwrap()
    }

    fn mask_for(set: &ModelSet, terms: &[TermSpec]) -> StructureMask {
        set.mask_of(terms).unwrap()
    }

    #[test]
    fn recovers_noise_free_arx() {
        let set = ModelSet::generate(1, 1, 2);
        let mask = mask_for(&set, &[TermSpec::new(vec![1], vec![]), TermSpec::new(vec![], vec![1])]);
        let theta = estimate_parameters(&set, &mask, &arx_data(200)).unwrap();
        assert_abs_diff_eq!(theta[0], 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(theta[1], 0.3, epsilon = 1e-8);
    }

    #[test]
    fn constant_only_fit() {
        let set = ModelSet::generate(1, 1, 1);
        let d = Dataset::split(vec![0.1; 20], vec![2.5; 20], 10).unwrap();
        let theta = estimate_parameters(&set, &StructureMask::from_bits(&[1, 0, 0]), &d).unwrap();
        assert_abs_diff_eq!(theta[0], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn empty_and_collinear_masks_are_errors() {
        let set = ModelSet::generate(1, 1, 1);
        let d = Dataset::split(vec![1.0; 20], vec![2.5; 20], 10).unwrap();
        assert_eq!(estimate_parameters(&set, &StructureMask::zeros(3), &d), Err(Error::EmptyStructure));
        // u constant: u(k-1) column equals the constant column.
        assert_eq!(estimate_parameters(&set, &StructureMask::from_bits(&[1, 0, 1]), &d), Err(Error::SingularFit));
    }

    fn model(set: ModelSet, bits: &[u8], coefficients: Vec<f64>) -> IdentifiedModel<f64> {
        IdentifiedModel { model_set: set, mask: StructureMask::from_bits(bits), coefficients, criterion: 0.0, nmse: 0.0 }
    }

    #[test]
    fn geometric_decay() {
        let m = model(ModelSet::generate(1, 1, 1), &[0, 1, 0], vec![0.5]);
        let run = simulate_model(&m, &[9.0, 9.0, 9.0, 9.0], &[1.0]).unwrap();
        assert_eq!(run.y_hat, vec![1.0, 0.5, 0.25, 0.125]);
        assert!(!run.diverged);
    }

    #[test]
    fn zero_model_is_silent() {
        let m = model(ModelSet::generate(1, 1, 1), &[1, 1, 1], vec![0.0; 3]);
        let run = simulate_model(&m, &[1.0, 2.0, 3.0, 4.0], &[7.0]).unwrap();
        assert_eq!(run.y_hat, vec![7.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn divergence_is_flagged_and_truncated() {
        let m = model(ModelSet::generate(1, 1, 1), &[0, 1, 0], vec![10.0]);
        let u = vec![0.0; 50];
        let run = simulate_model(&m, &u, &[1.0]).unwrap();
        assert!(run.diverged);
        assert!(run.y_hat.len() < 50);
    }

    #[test]
    fn input_only_model_equals_direct_evaluation() {
        let set = ModelSet::generate(2, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let picks: Vec<usize> = (0..set.len()).filter(|&i| !set.terms()[i].has_output_feedback()).collect();
        let mask = StructureMask::from_indices(set.len(), &picks);
        let coefficients: Vec<f64> = picks.iter().map(|&i| 0.1 * i as f64 - 0.3).collect();
        let m = model(set.clone(), &mask.to_bits(), coefficients.clone());
        let run = simulate_model(&m, &u, &[0.0, 0.0]).unwrap();
        for k in 2..u.len() {
            let direct: f64 = picks
                .iter()
                .zip(&coefficients)
                .map(|(&i, c)| c * set.terms()[i].evaluate(&u, &[0.0; 40], k).unwrap())
                .sum();
            assert_abs_diff_eq!(run.y_hat[k], direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn seed_must_cover_lags() {
        let m = model(ModelSet::generate(2, 2, 1), &[0, 1, 0, 0, 0], vec![0.5]);
        assert!(simulate_model(&m, &[0.0; 5], &[1.0]).is_err());
    }

    #[test]
    fn nmse_cases() {
        let y = [0.0, 1.0, 2.0];
        assert_eq!(compute_nmse(&y, &y).unwrap(), 0.0);
        assert_abs_diff_eq!(compute_nmse(&y, &[1.0, 1.0, 1.0]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(compute_nmse(&y, &[0.0, 1.0, 4.0]).unwrap(), 2.0, epsilon = 1e-15);
        assert!(matches!(compute_nmse(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::Degenerate(_))));
        assert!(compute_nmse(&[1.0], &[1.0]).is_err());
    }
}
