//! Outcome classification, selection frequency, pruning and residual tests.

mod correlation;
mod outcome;
mod prune;

pub use correlation::{
    correlation_tests, one_step_residuals, validate_model, CorrelationReport, CorrelationSeries, CorrelationTest,
    DEFAULT_MAX_LAG,
};
pub use outcome::{
    classify_outcome, selection_frequency, write_outcomes_csv, FrequencyReport, OutcomeKind, OutcomeTally,
    SearchOutcome,
};
pub use prune::{aggregate_outcomes, coefficient_p_values, prune_spurious, prune_with, DEFAULT_ALPHA};
