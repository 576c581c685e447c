//! Sampled Duffing and Van der Pol oscillators.
//!
//! The ODE is integrated with fixed-step RK4 while the input is held constant
//! between sampling instants, so `y(k)` depends on `u(k-1)` and earlier.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::benchmarks::noise::{stream_rng, WhiteNoise};
use crate::benchmarks::systems::default_estimation;
use crate::error::{Error, Result};
use crate::narx::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OscillatorKind {
    /// `ÿ + 2ζωₙẏ + ωₙ²y + ωₙ²εy³ = u`
    Duffing,
    /// `ÿ + 2ζωₙ(1 − y²)ẏ + ωₙ²y = u`
    VanDerPol,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub kind: OscillatorKind,
    pub omega_n: f64,
    pub zeta: f64,
    pub epsilon: f64,
    pub n: usize,
    pub sample_rate: f64,
    /// RK4 steps per sampling interval (at least 10).
    pub substeps: usize,
    /// Standard deviation of the held Gaussian input.
    pub amplitude: f64,
}

impl OscillatorParams {
    pub fn new(kind: OscillatorKind) -> Self {
        Self {
            kind,
            omega_n: 45.0 * PI,
            zeta: 0.01,
            epsilon: 3.0,
            n: 1000,
            sample_rate: 500.0,
            substeps: 10,
            amplitude: 1.0,
        }
    }

    fn acceleration(&self, y: f64, dy: f64, u: f64) -> f64 {
        let w2 = self.omega_n * self.omega_n;
        match self.kind {
            OscillatorKind::Duffing => u - 2.0 * self.zeta * self.omega_n * dy - w2 * y - w2 * self.epsilon * y.powi(3),
            OscillatorKind::VanDerPol => u - 2.0 * self.zeta * self.omega_n * (1.0 - y * y) * dy - w2 * y,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sample_rate > 0.0) {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        if self.substeps < 10 {
            return Err(Error::InvalidConfig("integrator step must be at most a tenth of the sample period".into()));
        }
        Ok(())
    }
}

/// Integrates from rest with the given held input; returns the output at each sampling instant.
pub fn integrate_oscillator(params: &OscillatorParams, u: &[f64]) -> Result<Vec<f64>> {
    params.validate()?;
    let h = 1.0 / (params.sample_rate * params.substeps as f64);
    let f = |y: f64, dy: f64, input: f64| (dy, params.acceleration(y, dy, input));
    let (mut y, mut dy) = (0.0f64, 0.0f64);
    let mut out = Vec::with_capacity(u.len());
    for (k, &uk) in u.iter().enumerate() {
        out.push(y);
        for s in 0..params.substeps {
            let (k1y, k1v) = f(y, dy, uk);
            let (k2y, k2v) = f(y + 0.5 * h * k1y, dy + 0.5 * h * k1v, uk);
            let (k3y, k3v) = f(y + 0.5 * h * k2y, dy + 0.5 * h * k2v, uk);
            let (k4y, k4v) = f(y + h * k3y, dy + h * k3v, uk);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            dy += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if !(y.is_finite() && dy.is_finite()) {
                let t = (k * params.substeps + s + 1) as f64 * h;
                return Err(Error::IntegratorUnstable(t));
            }
        }
    }
    Ok(out)
}

/// Samples the oscillator under zero-order-held Gaussian excitation with the
/// default 70/30 split.
pub fn simulate_oscillator(params: &OscillatorParams, seed: u64) -> Result<Dataset<f64>> {
    if params.n < 50 {
        return Err(Error::InvalidConfig(format!("record length {} < 50", params.n)));
    }
    let input = WhiteNoise::Gaussian { mean: 0.0, variance: params.amplitude * params.amplitude };
    let u = input.sample_with(params.n, &mut stream_rng(seed, 0))?;
    let y = integrate_oscillator(params, &u)?;
    Dataset::split(u, y, default_estimation(params.n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear(substeps: usize) -> OscillatorParams {
        OscillatorParams { epsilon: 0.0, substeps, n: 200, ..OscillatorParams::new(OscillatorKind::Duffing) }
    }

    /// Unit-step response of `ÿ + 2ζωẏ + ω²y = 1` from rest.
    fn analytic_step(p: &OscillatorParams, t: f64) -> f64 {
        let (w, z) = (p.omega_n, p.zeta);
        let wd = w * (1.0 - z * z).sqrt();
        (1.0 - (-z * w * t).exp() * ((wd * t).cos() + z / (1.0 - z * z).sqrt() * (wd * t).sin())) / (w * w)
    }

    fn step_error(p: &OscillatorParams) -> f64 {
        let y = integrate_oscillator(p, &vec![1.0; p.n]).unwrap();
        let scale = 1.0 / (p.omega_n * p.omega_n);
        y.iter()
            .enumerate()
            .map(|(k, v)| (v - analytic_step(p, k as f64 / p.sample_rate)).abs() / scale)
            .fold(0.0, f64::max)
    }

    #[test]
    fn rest_stays_at_rest() {
        let p = OscillatorParams::new(OscillatorKind::Duffing);
        assert!(integrate_oscillator(&p, &[0.0; 100]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_step_response_matches_damped_sinusoid() {
        assert!(step_error(&linear(10)) < 0.01);
    }

    #[test]
    fn fourth_order_convergence() {
        let e1 = step_error(&linear(10));
        let e2 = step_error(&linear(20));
        let ratio = e1 / e2;
        assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn halving_the_step_barely_moves_the_samples() {
        let mut p = OscillatorParams::new(OscillatorKind::Duffing);
        let u = WhiteNoise::Gaussian { mean: 0.0, variance: 1.0 }.sample_with(p.n, &mut stream_rng(1, 0)).unwrap();
        let a = integrate_oscillator(&p, &u).unwrap();
        p.substeps = 20;
        let b = integrate_oscillator(&p, &u).unwrap();
        let rms = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt();
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        assert!(rms(&diff) < 1e-6);
        assert!(rms(&diff) < 1e-6 * rms(&a));
    }

    #[test]
    fn rejects_coarse_steps_and_reports_blowup() {
        let p = OscillatorParams { substeps: 5, ..OscillatorParams::new(OscillatorKind::VanDerPol) };
        assert!(integrate_oscillator(&p, &[0.0]).is_err());
        let p = OscillatorParams { epsilon: 1e12, ..OscillatorParams::new(OscillatorKind::Duffing) };
        assert!(matches!(integrate_oscillator(&p, &[1e9; 50]), Err(Error::IntegratorUnstable(_))));
    }

    #[test]
    fn default_record() {
        let d = simulate_oscillator(&OscillatorParams::new(OscillatorKind::VanDerPol), 3).unwrap();
        assert_eq!((d.n_est(), d.n_val()), (700, 300));
        assert!(d.y().iter().all(|v| v.is_finite()));
    }
}
