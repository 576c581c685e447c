//! Residual correlation tests for nonlinear model validity.

use std::io::Write;

use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{Error, Result};
use crate::narx::{Dataset, IdentifiedModel};
use crate::scalar::Scalar;
use crate::validation::outcome::csv_err;

pub const DEFAULT_MAX_LAG: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationTest {
    /// `Φ_εε(τ)`
    ResidualAuto,
    /// `Φ_uε(τ)`
    InputResidual,
    /// `Φ_ε(εu)(τ)`
    ResidualResidualInput,
    /// `Φ_u²'ε(τ)`
    SquaredInputResidual,
    /// `Φ_u²'ε²(τ)`
    SquaredInputSquaredResidual,
}

impl CorrelationTest {
    pub const ALL: [CorrelationTest; 5] = [
        CorrelationTest::ResidualAuto,
        CorrelationTest::InputResidual,
        CorrelationTest::ResidualResidualInput,
        CorrelationTest::SquaredInputResidual,
        CorrelationTest::SquaredInputSquaredResidual,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CorrelationTest::ResidualAuto => "phi_ee",
            CorrelationTest::InputResidual => "phi_ue",
            CorrelationTest::ResidualResidualInput => "phi_e_eu",
            CorrelationTest::SquaredInputResidual => "phi_u2_e",
            CorrelationTest::SquaredInputSquaredResidual => "phi_u2_e2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub test: CorrelationTest,
    /// Values at lags `0..=max_lag`.
    pub values: Vec<f64>,
}

impl CorrelationSeries {
    /// Lags that count toward the verdict: the autocorrelation skips lag 0.
    fn judged(&self) -> &[f64] {
        match self.test {
            CorrelationTest::ResidualAuto => &self.values[1..],
            _ => &self.values,
        }
    }

    pub fn excursions(&self, band: f64) -> usize {
        self.judged().iter().filter(|v| v.abs() > band).count()
    }

    /// Passes when the band is left no more often than white noise would leave
    /// it (99.5% binomial quantile at the 5% rate), and never by more than twice its width.
    pub fn passes(&self, band: f64) -> bool {
        let judged = self.judged();
        let allowed = excursion_allowance(judged.len());
        self.excursions(band) <= allowed && judged.iter().all(|v| v.abs() <= 2.0 * band)
    }
}

fn excursion_allowance(n: usize) -> usize {
    let b = Binomial::new(0.05, n as u64).expect("valid binomial");
    (0..=n).find(|&k| b.cdf(k as u64) >= 0.995).unwrap_or(n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub n: usize,
    /// 95% confidence half-width `1.96/√N`.
    pub band: f64,
    pub series: Vec<CorrelationSeries>,
}

impl CorrelationReport {
    pub fn get(&self, test: CorrelationTest) -> &CorrelationSeries {
        self.series.iter().find(|s| s.test == test).expect("all tests present")
    }

    pub fn passes(&self, test: CorrelationTest) -> bool {
        self.get(test).passes(self.band)
    }

    pub fn all_pass(&self) -> bool {
        self.series.iter().all(|s| s.passes(self.band))
    }

    /// Writes `test,lag,value,band` rows.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["test", "lag", "value", "band"]).map_err(csv_err)?;
        for s in &self.series {
            for (lag, v) in s.values.iter().enumerate() {
                out.write_record([s.test.label().to_string(), lag.to_string(), v.to_string(), self.band.to_string()])
                    .map_err(csv_err)?;
            }
        }
        out.flush().map_err(|e| Error::InvalidConfig(e.to_string()))
    }
}

fn centered(x: &[f64]) -> Result<Vec<f64>> {
    let m = x.iter().sum::<f64>() / x.len() as f64;
    let c: Vec<f64> = x.iter().map(|v| v - m).collect();
    let scale = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(scale > 0.0) || c.iter().all(|v| v.abs() <= 8.0 * f64::EPSILON * scale) {
        return Err(Error::Degenerate("constant sequence"));
    }
    Ok(c)
}

/// Biased normalized cross-correlation `Σ a(k) b(k+τ) / √(Σa² Σb²)` of centered sequences.
fn cross(a: &[f64], b: &[f64], max_lag: usize) -> Vec<f64> {
    let scale = (a.iter().map(|v| v * v).sum::<f64>() * b.iter().map(|v| v * v).sum::<f64>()).sqrt();
    (0..=max_lag)
        .map(|tau| a.iter().zip(&b[tau..]).map(|(x, y)| x * y).sum::<f64>() / scale)
        .collect()
}

/// The five correlation tests of residuals `e` against input `u`.
pub fn correlation_tests(residuals: &[f64], u: &[f64], max_lag: usize) -> Result<CorrelationReport> {
    let n = residuals.len();
    if u.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: u.len() });
    }
    if max_lag == 0 || n < 4 * max_lag {
        return Err(Error::Degenerate("record shorter than four times the lag range"));
    }
    let e = centered(residuals)?;
    let uc = centered(u)?;
    let u2 = centered(&u.iter().map(|v| v * v).collect::<Vec<_>>())?;
    let e2 = centered(&residuals.iter().map(|v| v * v).collect::<Vec<_>>())?;
    let eu = centered(&residuals.iter().zip(u).map(|(a, b)| a * b).collect::<Vec<_>>())?;
    // Φ_ε(εu)(τ) pairs ε(k) with ε(k−1−τ)u(k−1−τ).
    let e_eu: Vec<f64> = cross(&eu, &e, max_lag + 1)[1..].to_vec();
    let series = vec![
        CorrelationSeries { test: CorrelationTest::ResidualAuto, values: cross(&e, &e, max_lag) },
        CorrelationSeries { test: CorrelationTest::InputResidual, values: cross(&uc, &e, max_lag) },
        CorrelationSeries { test: CorrelationTest::ResidualResidualInput, values: e_eu },
        CorrelationSeries { test: CorrelationTest::SquaredInputResidual, values: cross(&u2, &e, max_lag) },
        CorrelationSeries { test: CorrelationTest::SquaredInputSquaredResidual, values: cross(&u2, &e2, max_lag) },
    ];
    Ok(CorrelationReport { n, band: 1.96 / (n as f64).sqrt(), series })
}

/// One-step-ahead residuals `y(k) − ŷ(k|k−1)` over every row with full lag history.
pub fn one_step_residuals<T: Scalar>(model: &IdentifiedModel<T>, dataset: &Dataset<T>) -> Result<Vec<f64>> {
    let terms = model.terms();
    let start = model.model_set.max_lag();
    (start..dataset.len())
        .map(|k| {
            let mut pred = T::zero();
            for (t, &c) in terms.iter().zip(&model.coefficients) {
                pred = pred + c * t.evaluate(dataset.u(), dataset.y(), k)?;
            }
            Ok((dataset.y()[k] - pred).to_f64_lossy())
        })
        .collect()
}

/// Correlation tests on the one-step residuals of `model`.
pub fn validate_model<T: Scalar>(model: &IdentifiedModel<T>, dataset: &Dataset<T>, max_lag: usize) -> Result<CorrelationReport> {
    let e = one_step_residuals(model, dataset)?;
    let start = dataset.len() - e.len();
    let u: Vec<f64> = dataset.u()[start..].iter().map(|v| v.to_f64_lossy()).collect();
    correlation_tests(&e, &u, max_lag)
}
