//! Discrete benchmark systems S1-S7.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::benchmarks::noise::{stream_rng, WhiteNoise};
use crate::error::{Error, Result};
use crate::narx::{Dataset, ModelSet, StructureMask, TermSpec};

/// Record length used by every benchmark unless overridden.
pub const DEFAULT_LENGTH: usize = 1000;
/// Estimation samples out of [`DEFAULT_LENGTH`].
pub const DEFAULT_ESTIMATION: usize = 700;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemId {
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    Duffing,
    VanDerPol,
}

impl SystemId {
    pub const DISCRETE: [SystemId; 6] =
        [SystemId::S1, SystemId::S2, SystemId::S3, SystemId::S4, SystemId::S5, SystemId::S6];
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for SystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "s1" => SystemId::S1,
            "s2" => SystemId::S2,
            "s3" => SystemId::S3,
            "s4" => SystemId::S4,
            "s5" => SystemId::S5,
            "s6" => SystemId::S6,
            "s7" => SystemId::S7,
            "duffing" => SystemId::Duffing,
            "vanderpol" | "van-der-pol" | "vdp" => SystemId::VanDerPol,
            _ => return Err(Error::InvalidConfig(format!("unknown system '{s}'"))),
        })
    }
}

/// Ground truth and excitation of a benchmark system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub id: SystemId,
    /// Empty for the continuous-time oscillators.
    pub true_terms: Vec<TermSpec>,
    pub true_coefficients: Vec<f64>,
    pub input: WhiteNoise,
    pub noise: WhiteNoise,
}

fn t(y: &[usize], u: &[usize]) -> TermSpec {
    TermSpec::new(y.to_vec(), u.to_vec())
}

const WUN_01: WhiteNoise = WhiteNoise::Uniform { low: 0.0, high: 1.0 };
const WUN_11: WhiteNoise = WhiteNoise::Uniform { low: -1.0, high: 1.0 };

const fn wgn(variance: f64) -> WhiteNoise {
    WhiteNoise::Gaussian { mean: 0.0, variance }
}

impl SystemSpec {
    pub fn of(id: SystemId) -> Self {
        let (terms, coefficients, input, noise): (Vec<TermSpec>, Vec<f64>, _, _) = match id {
            SystemId::S1 => (
                vec![t(&[1], &[]), t(&[], &[1]), t(&[1], &[1]), t(&[], &[1, 1])],
                vec![0.5, 0.3, 0.3, 0.5],
                WUN_01,
                wgn(0.002),
            ),
            SystemId::S2 => (
                vec![TermSpec::constant(), t(&[1], &[]), t(&[], &[2]), t(&[], &[1, 1]), t(&[2, 2], &[])],
                vec![0.5, 0.5, 0.8, 1.0, -0.05],
                WUN_01,
                wgn(0.05),
            ),
            SystemId::S3 => (
                vec![t(&[1], &[]), t(&[], &[1]), t(&[], &[1, 1]), t(&[], &[1, 1, 1])],
                vec![0.8, 0.4, 0.4, 0.4],
                wgn(1.0),
                wgn(0.33 * 0.33),
            ),
            SystemId::S4 => (
                vec![t(&[1], &[]), t(&[], &[1]), t(&[2, 2], &[]), t(&[2], &[1, 1]), t(&[], &[3, 3, 3])],
                vec![0.1586, 0.6777, 0.3037, -0.2566, -0.0339],
                WUN_01,
                wgn(0.002),
            ),
            SystemId::S5 => (
                vec![t(&[1], &[1]), t(&[2], &[]), t(&[], &[2, 2]), t(&[2], &[2, 2])],
                vec![0.7, -0.5, 0.6, -0.7],
                WUN_11,
                wgn(0.004),
            ),
            SystemId::S6 => (
                vec![t(&[1, 1, 1], &[]), t(&[1], &[1]), t(&[], &[2, 2]), t(&[2], &[2, 2]), t(&[2], &[])],
                vec![0.2, 0.7, 0.6, -0.7, -0.5],
                WUN_11,
                wgn(0.004),
            ),
            SystemId::S7 => (
                vec![t(&[], &[1]), t(&[], &[2]), t(&[], &[1, 2]), t(&[], &[1, 1, 1])],
                vec![1.0, 0.5, 0.25, -0.3],
                // Driving noise of the AR input filter, not the input itself.
                wgn(1.0),
                wgn(0.02),
            ),
            SystemId::Duffing | SystemId::VanDerPol => (vec![], vec![], wgn(1.0), wgn(0.0)),
        };
        Self { id, true_terms: terms, true_coefficients: coefficients, input, noise }
    }

    /// Mask of the true terms within `model_set`.
    pub fn true_mask(&self, model_set: &ModelSet) -> Result<StructureMask> {
        model_set.mask_of(&self.true_terms)
    }

    fn max_lag(&self) -> usize {
        self.true_terms.iter().map(TermSpec::max_lag).max().unwrap_or(0)
    }
}

/// Runs the difference equation `y(k) = Σ θᵢ xᵢ(k) + e(k)` from zero initial conditions.
pub fn run_difference_equation(spec: &SystemSpec, u: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    if u.len() != e.len() {
        return Err(Error::LengthMismatch { expected: u.len(), actual: e.len() });
    }
    let pad = spec.max_lag();
    let mut up = vec![0.0; pad];
    up.extend_from_slice(u);
    let mut yp = vec![0.0; pad + u.len()];
    for k in 0..u.len() {
        let kp = k + pad;
        let mut v = e[k];
        for (term, c) in spec.true_terms.iter().zip(&spec.true_coefficients) {
            v += c * term.evaluate_unchecked(&up, &yp, kp);
        }
        if !v.is_finite() {
            return Err(Error::Diverged(k));
        }
        yp[kp] = v;
    }
    Ok(yp.split_off(pad))
}

/// Generates `n` samples of S1-S6 with fresh input and noise draws and the default
/// 70/30 estimation split.
pub fn simulate_system(spec: &SystemSpec, n: usize, seed: u64) -> Result<Dataset<f64>> {
    if n < 50 {
        return Err(Error::InvalidConfig(format!("record length {n} < 50")));
    }
    if matches!(spec.id, SystemId::S7 | SystemId::Duffing | SystemId::VanDerPol) {
        return Err(Error::InvalidConfig(format!("{} has its own generator", spec.id)));
    }
    let u = spec.input.sample_with(n, &mut stream_rng(seed, 0))?;
    let e = spec.noise.sample_with(n, &mut stream_rng(seed, 1))?;
    let y = run_difference_equation(spec, &u, &e)?;
    Dataset::split(u, y, default_estimation(n))
}

pub(crate) fn default_estimation(n: usize) -> usize {
    n * DEFAULT_ESTIMATION / DEFAULT_LENGTH
}

/// Slowly varying excitation `u = 0.3 / (1 − 1.6z⁻¹ + 0.64z⁻²) v`.
pub fn slow_input(v: &[f64]) -> Vec<f64> {
    let mut u = vec![0.0; v.len()];
    for k in 0..v.len() {
        let u1 = if k >= 1 { u[k - 1] } else { 0.0 };
        let u2 = if k >= 2 { u[k - 2] } else { 0.0 };
        u[k] = 1.6 * u1 - 0.64 * u2 + 0.3 * v[k];
    }
    u
}

/// Static polynomial of S7 driven by `u`, zero before the record starts.
pub fn s7_noise_free(u: &[f64]) -> Vec<f64> {
    let at = |k: usize, lag: usize| if k >= lag { u[k - lag] } else { 0.0 };
    (0..u.len())
        .map(|k| {
            let (u1, u2) = (at(k, 1), at(k, 2));
            u1 + 0.5 * u2 + 0.25 * u1 * u2 - 0.3 * u1.powi(3)
        })
        .collect()
}

/// S7: slow AR(2) input, static polynomial output, AR(1)-colored measurement noise.
pub fn simulate_s7(n: usize, seed: u64) -> Result<Dataset<f64>> {
    if n < 50 {
        return Err(Error::InvalidConfig(format!("record length {n} < 50")));
    }
    let spec = SystemSpec::of(SystemId::S7);
    let v = spec.input.sample_with(n, &mut stream_rng(seed, 0))?;
    let e = spec.noise.sample_with(n, &mut stream_rng(seed, 1))?;
    let u = slow_input(&v);
    let w = s7_noise_free(&u);
    let mut colored = 0.0;
    let y = w
        .iter()
        .zip(&e)
        .map(|(&wk, &ek)| {
            colored = 0.8 * colored + ek;
            wk + colored
        })
        .collect();
    Dataset::split(u, y, default_estimation(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::narx::{estimate_parameters, ModelSet};

    fn noise_free(id: SystemId, n: usize, seed: u64) -> Dataset<f64> {
        let spec = SystemSpec::of(id);
        let u = spec.input.sample_with(n, &mut stream_rng(seed, 0)).unwrap();
        let y = run_difference_equation(&spec, &u, &vec![0.0; n]).unwrap();
        Dataset::split(u, y, 700).unwrap()
    }

    #[test]
    fn table_terms_are_in_the_model_set() {
        let set = ModelSet::generate(4, 4, 3);
        for id in SystemId::DISCRETE.into_iter().chain([SystemId::S7]) {
            let spec = SystemSpec::of(id);
            assert_eq!(spec.true_terms.len(), spec.true_coefficients.len());
            assert_eq!(spec.true_mask(&set).unwrap().cardinality(), spec.true_terms.len(), "{id}");
        }
    }

    #[test]
    fn zero_fixed_point_of_s1() {
        let spec = SystemSpec::of(SystemId::S1);
        let y = run_difference_equation(&spec, &[0.0; 100], &[0.0; 100]).unwrap();
        assert!(y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn s2_settles_at_quadratic_root() {
        let spec = SystemSpec::of(SystemId::S2);
        let y = run_difference_equation(&spec, &[0.0; 500], &[0.0; 500]).unwrap();
        // 0.05 y² + 0.5 y − 0.5 = 0
        let root = (-0.5 + (0.25f64 + 0.1).sqrt()) / 0.1;
        assert!((root - 0.91608).abs() < 1e-5);
        assert!((y[499] - root).abs() < 1e-9);
    }

    #[test]
    fn s3_noise_free_refit_is_exact() {
        let d = noise_free(SystemId::S3, 1000, 8);
        let set = ModelSet::generate(4, 4, 3);
        let spec = SystemSpec::of(SystemId::S3);
        let theta = estimate_parameters(&set, &spec.true_mask(&set).unwrap(), &d).unwrap();
        for (a, b) in theta.iter().zip(&spec.true_coefficients) {
            assert!((a - b).abs() < 1e-6, "{theta:?}");
        }
    }

    #[test]
    fn generators_are_pure() {
        let spec = SystemSpec::of(SystemId::S5);
        assert_eq!(simulate_system(&spec, 300, 4).unwrap(), simulate_system(&spec, 300, 4).unwrap());
        assert_ne!(simulate_system(&spec, 300, 4).unwrap(), simulate_system(&spec, 300, 5).unwrap());
        let d = simulate_system(&spec, 1000, 1).unwrap();
        assert_eq!((d.n_est(), d.n_val()), (700, 300));
        assert!(simulate_system(&spec, 20, 1).is_err());
        assert_eq!(simulate_s7(200, 3).unwrap(), simulate_s7(200, 3).unwrap());
    }

    #[test]
    fn s7_input_filter_has_repeated_pole() {
        // (1 − 0.8z⁻¹)² = 1 − 1.6z⁻¹ + 0.64z⁻²; impulse response 0.3 (k+1) 0.8^k.
        assert!((2.0 * 0.8 - 1.6f64).abs() < 1e-15 && (0.8f64 * 0.8 - 0.64).abs() < 1e-15);
        let mut v = vec![0.0; 10];
        v[0] = 1.0;
        let u = slow_input(&v);
        for (k, &uk) in u.iter().enumerate() {
            assert!((uk - 0.3 * (k as f64 + 1.0) * 0.8f64.powi(k as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn s7_polynomial_by_hand() {
        // Impulse excitation: u = [0, 1, 0, 0, ...]
        let u = [0.0, 1.0, 0.0, 0.0, 0.0];
        let w = s7_noise_free(&u);
        // w(2) = u(1) − 0.3 u(1)³ = 0.7; w(3) = 0.5 u(1) = 0.5; cross term zero throughout.
        assert_eq!(&w[..4], &[0.0, 0.0, 0.7, 0.5]);
        let u = [1.0, 2.0, 0.0];
        // w(2) = 2 + 0.5·1 + 0.25·2·1 − 0.3·8 = 0.6
        assert!((s7_noise_free(&u)[2] - 0.6).abs() < 1e-12);
    }

    #[test]
    fn s7_noise_free_refit_is_exact() {
        let v = SystemSpec::of(SystemId::S7).input.sample_with(1000, &mut stream_rng(2, 0)).unwrap();
        let u = slow_input(&v);
        let y = s7_noise_free(&u);
        let d = Dataset::split(u, y, 700).unwrap();
        let set = ModelSet::generate(4, 4, 3);
        let spec = SystemSpec::of(SystemId::S7);
        let mask = spec.true_mask(&set).unwrap();
        let theta = estimate_parameters(&set, &mask, &d).unwrap();
        // Mask order is canonical, so compare through the term list.
        for (term, value) in set.select(&mask).unwrap().iter().zip(&theta) {
            let i = spec.true_terms.iter().position(|t| t == term).unwrap();
            assert!((value - spec.true_coefficients[i]).abs() < 1e-6, "{term}: {value}");
        }
    }

    #[test]
    fn s7_input_is_slow() {
        let d = simulate_s7(1000, 12).unwrap();
        let u = d.u();
        let m = u.iter().sum::<f64>() / u.len() as f64;
        let c0: f64 = u.iter().map(|x| (x - m).powi(2)).sum();
        let c1: f64 = u.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
        assert!(c1 / c0 > 0.9);
    }

    #[test]
    fn unknown_system_name() {
        assert!("S9".parse::<SystemId>().is_err());
        assert_eq!("vdp".parse::<SystemId>().unwrap(), SystemId::VanDerPol);
    }
}
