//! Binary particle swarm with a sigmoid transfer function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::narx::{BicEvaluator, Dataset, Fitness, ModelSet, StructureMask};
use crate::report::{RunReport, SearchResult, TraceEntry};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BpsoConfig {
    pub ps: usize,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub max_fes: usize,
}

impl Default for BpsoConfig {
    fn default() -> Self {
        Self { ps: 30, omega: 1.0, c1: 2.0, c2: 2.0, v_min: -6.0, v_max: 6.0, max_fes: 6000 }
    }
}

impl BpsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ps < 2 {
            return Err(Error::InvalidConfig(format!("swarm size {} < 2", self.ps)));
        }
        if !(self.v_min < self.v_max) {
            return Err(Error::InvalidConfig(format!("velocity bounds {} >= {}", self.v_min, self.v_max)));
        }
        if self.max_fes < self.ps {
            return Err(Error::InvalidConfig(format!("budget {} below swarm size {}", self.max_fes, self.ps)));
        }
        Ok(())
    }
}

pub fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Bernoulli bits with success probability `sigmoid(v)` per entry.
pub fn sample_bits<R: Rng>(velocity: &[f64], rng: &mut R) -> StructureMask {
    StructureMask::from_bools(velocity.iter().map(|&v| rng.gen::<f64>() < sigmoid(v)).collect())
}

#[derive(Debug, Clone)]
struct Particle {
    x: StructureMask,
    v: Vec<f64>,
    pbest: StructureMask,
    pbest_value: f64,
}

fn best_index(ps: &[Particle]) -> usize {
    let mut best = 0;
    for (i, p) in ps.iter().enumerate() {
        if p.pbest_value < ps[best].pbest_value {
            best = i;
        }
    }
    best
}

/// Runs the swarm until the evaluation budget is spent; velocities are
/// clamped to `[v_min, v_max]` after every update.
pub fn fly<F: Fitness + ?Sized>(fitness: &F, config: &BpsoConfig, seed: u64) -> Result<SearchResult> {
    config.validate()?;
    let n = fitness.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init: Vec<(StructureMask, Vec<f64>)> = (0..config.ps)
        .map(|_| {
            let x = StructureMask::from_bools((0..n).map(|_| rng.gen_bool(0.5)).collect());
            let v = (0..n).map(|_| rng.gen_range(config.v_min..=config.v_max)).collect();
            (x, v)
        })
        .collect();
    let values: Vec<f64> = init.par_iter().map(|(x, _)| fitness.evaluate(x)).collect();
    let mut swarm: Vec<Particle> = init
        .into_iter()
        .zip(values)
        .map(|((x, v), value)| Particle { pbest: x.clone(), x, v, pbest_value: value })
        .collect();
    let mut fes = config.ps;
    let mut g = best_index(&swarm);
    let mut trace = vec![TraceEntry { iter: 0, criterion: swarm[g].pbest_value, xi: swarm[g].pbest.cardinality() }];
    let mut iter = 0;
    while fes < config.max_fes {
        let active = config.ps.min(config.max_fes - fes);
        let gbest = swarm[g].pbest.clone();
        for p in swarm.iter_mut().take(active) {
            for i in 0..n {
                let x = f64::from(u8::from(p.x.get(i)));
                let pb = f64::from(u8::from(p.pbest.get(i)));
                let gb = f64::from(u8::from(gbest.get(i)));
                let (r1, r2): (f64, f64) = (rng.gen(), rng.gen());
                let v = config.omega * p.v[i] + config.c1 * r1 * (pb - x) + config.c2 * r2 * (gb - x);
                p.v[i] = v.clamp(config.v_min, config.v_max);
            }
            p.x = sample_bits(&p.v, &mut rng);
        }
        let values: Vec<f64> = swarm[..active].par_iter().map(|p| fitness.evaluate(&p.x)).collect();
        for (p, value) in swarm.iter_mut().zip(values) {
            if value < p.pbest_value {
                p.pbest_value = value;
                p.pbest = p.x.clone();
            }
        }
        fes += active;
        iter += 1;
        g = best_index(&swarm);
        trace.push(TraceEntry { iter, criterion: swarm[g].pbest_value, xi: swarm[g].pbest.cardinality() });
    }
    let best = &swarm[g];
    Ok(SearchResult { best_mask: best.pbest.clone(), best_value: best.pbest_value, trace, fes_used: fes })
}

pub fn run_bpso<T: Scalar>(
    dataset: &Dataset<T>,
    model_set: &ModelSet,
    config: &BpsoConfig,
    seed: u64,
) -> Result<RunReport> {
    let evaluator = BicEvaluator::new(model_set, dataset)?;
    let outcome = fly(&evaluator, config, seed)?;
    let config_json = serde_json::to_value(config).expect("config serializes");
    Ok(RunReport::from_outcome("bpso", seed, config_json, outcome, &evaluator))
}
