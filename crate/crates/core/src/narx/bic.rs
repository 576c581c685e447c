//! Bayesian information criterion on free-run validation error.
//!
//! `J = 𝒩_v·ln(ℰ) + ln(𝒩_v)·ξ`, where ℰ is the mean squared error of the
//! model-predicted (free-run) output over the validation segment. Coefficients
//! are estimated by one-step-ahead least squares on the estimation segment, and
//! the simulation is seeded with the measured outputs preceding the validation
//! segment. Empty, rank-deficient and divergent structures all score
//! [`Scalar::max_value`].

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, LeastSquares, Matrix};
use crate::narx::data::Dataset;
use crate::narx::mask::StructureMask;
use crate::narx::model::{compute_nmse, divergence_bound, free_run, regressor_columns, IdentifiedModel};
use crate::narx::term::{ModelSet, TermSpec};
use crate::scalar::Scalar;

/// Lower clamp on ℰ before taking the logarithm.
pub const MSE_FLOOR: f64 = 1e-300;

/// `𝒩_v·ln(ℰ) + ln(𝒩_v)·ξ` with ℰ clamped below at [`MSE_FLOOR`].
pub fn bic_value<T: Scalar>(n_val: usize, mse: T, cardinality: usize) -> T {
    let floor = T::lit(MSE_FLOOR).max(T::min_positive_value());
    let n = T::from_usize_lossy(n_val);
    n * mse.max(floor).ln() + n.ln() * T::from_usize_lossy(cardinality)
}

/// Anything that scores a structure mask; lower is better.
pub trait Fitness: Sync {
    /// Mask length N_t.
    fn dimension(&self) -> usize;
    fn evaluate(&self, mask: &StructureMask) -> f64;
}

/// Adapts a closure into a [`Fitness`].
pub struct FnFitness<F> {
    dimension: usize,
    f: F,
}

impl<F: Fn(&StructureMask) -> f64 + Sync> FnFitness<F> {
    pub fn new(dimension: usize, f: F) -> Self {
        Self { dimension, f }
    }
}

impl<F: Fn(&StructureMask) -> f64 + Sync> Fitness for FnFitness<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn evaluate(&self, mask: &StructureMask) -> f64 {
        (self.f)(mask)
    }
}

/// Wraps a fitness and counts every call.
pub struct CountingFitness<'a, F: ?Sized> {
    inner: &'a F,
    calls: AtomicUsize,
}

impl<'a, F: Fitness + ?Sized> CountingFitness<'a, F> {
    pub fn new(inner: &'a F) -> Self {
        Self { inner, calls: AtomicUsize::new(0) }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<F: Fitness + ?Sized> Fitness for CountingFitness<'_, F> {
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn evaluate(&self, mask: &StructureMask) -> f64 {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.evaluate(mask)
    }
}

/// Precomputes every candidate regressor over the estimation rows so that each
/// criterion evaluation only assembles the selected columns.
#[derive(Debug, Clone)]
pub struct BicEvaluator<'a, T> {
    model_set: &'a ModelSet,
    dataset: &'a Dataset<T>,
    first_row: usize,
    columns: Vec<Vec<T>>,
    bound: T,
}

impl<'a, T: Scalar> BicEvaluator<'a, T> {
    pub fn new(model_set: &'a ModelSet, dataset: &'a Dataset<T>) -> Result<Self> {
        let first_row = model_set.max_lag();
        if dataset.n_est() <= first_row {
            return Err(Error::InvalidSplit { n_est: dataset.n_est(), len: dataset.len() });
        }
        let all: Vec<&TermSpec> = model_set.terms().iter().collect();
        let columns = regressor_columns(&all, dataset, first_row);
        let max_abs = dataset.y().iter().fold(T::zero(), |m, v| m.max(v.abs()));
        Ok(Self { model_set, dataset, first_row, columns, bound: divergence_bound(max_abs) })
    }

    pub fn model_set(&self) -> &ModelSet {
        self.model_set
    }

    pub fn dataset(&self) -> &Dataset<T> {
        self.dataset
    }

    fn check(&self, mask: &StructureMask) -> Result<()> {
        if mask.len() != self.model_set.len() {
            return Err(Error::LengthMismatch { expected: self.model_set.len(), actual: mask.len() });
        }
        if mask.cardinality() == 0 {
            return Err(Error::EmptyStructure);
        }
        Ok(())
    }

    /// One-step-ahead LS fit of the selected terms on the estimation segment.
    pub fn fit(&self, mask: &StructureMask) -> Result<LeastSquares<T>> {
        self.check(mask)?;
        let cols: Vec<&[T]> = mask.set_indices().map(|i| self.columns[i].as_slice()).collect();
        let a = Matrix::from_columns(self.dataset.n_est() - self.first_row, &cols)?;
        least_squares(&a, &self.dataset.y()[self.first_row..self.dataset.n_est()])
    }

    /// Free-run prediction over the validation segment (length 𝒩_v).
    pub fn predict_validation(&self, mask: &StructureMask, coefficients: &[T]) -> Result<Vec<T>> {
        let terms: Vec<&TermSpec> = mask.set_indices().map(|i| &self.model_set.terms()[i]).collect();
        let n_est = self.dataset.n_est();
        let run = free_run(&terms, coefficients, self.dataset.u(), self.dataset.y(), n_est, self.bound);
        if run.diverged {
            return Err(Error::Diverged(run.y_hat.len()));
        }
        Ok(run.y_hat[n_est..].to_vec())
    }

    /// Mean squared free-run error ℰ over the validation segment.
    pub fn validation_mse(&self, mask: &StructureMask, coefficients: &[T]) -> Result<T> {
        let y_hat = self.predict_validation(mask, coefficients)?;
        let n = T::from_usize_lossy(y_hat.len());
        let sse: T = self.dataset.validation_y().iter().zip(&y_hat).map(|(&a, &b)| (a - b).powi(2)).sum();
        let mse = sse / n;
        if mse.is_finite() {
            Ok(mse)
        } else {
            Err(Error::Diverged(self.dataset.len()))
        }
    }

    fn try_criterion(&self, mask: &StructureMask) -> Result<T> {
        let ls = self.fit(mask)?;
        let mse = self.validation_mse(mask, &ls.coefficients)?;
        Ok(bic_value(self.dataset.n_val(), mse, mask.cardinality()))
    }

    /// Criterion J, with every pathology mapped to the largest finite value.
    pub fn criterion(&self, mask: &StructureMask) -> T {
        match self.try_criterion(mask) {
            Ok(j) if j.is_finite() => j,
            _ => T::max_value(),
        }
    }

    /// Fits, scores and packages a structure.
    pub fn identify(&self, mask: &StructureMask) -> Result<IdentifiedModel<T>> {
        let ls = self.fit(mask)?;
        let y_hat = self.predict_validation(mask, &ls.coefficients)?;
        let nmse = compute_nmse(self.dataset.validation_y(), &y_hat).unwrap_or(T::max_value());
        Ok(IdentifiedModel {
            model_set: self.model_set.clone(),
            mask: mask.clone(),
            criterion: self.criterion(mask),
            coefficients: ls.coefficients,
            nmse,
        })
    }
}

impl<T: Scalar> Fitness for BicEvaluator<'_, T> {
    fn dimension(&self) -> usize {
        self.model_set.len()
    }

    fn evaluate(&self, mask: &StructureMask) -> f64 {
        let j = self.criterion(mask);
        if j == T::max_value() {
            f64::MAX
        } else {
            j.to_f64_lossy()
        }
    }
}

/// Criterion J of `mask` on `dataset`; see [`BicEvaluator`].
pub fn evaluate_bic<T: Scalar>(model_set: &ModelSet, mask: &StructureMask, dataset: &Dataset<T>) -> T {
    match BicEvaluator::new(model_set, dataset) {
        Ok(ev) => ev.criterion(mask),
        Err(_) => T::max_value(),
    }
}
