//! Two-dimensional unified particle swarm over structure masks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::narx::{BicEvaluator, Dataset, Fitness, ModelSet, StructureMask};
use crate::report::{RunReport, SearchResult, TraceEntry};
use crate::scalar::Scalar;
use crate::search::learning::{extract_learning_set, extract_self_learning_set};
use crate::search::velocity::{compute_delta, update_position, update_velocity, Exemplars, VelocityState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwarmConfig {
    /// Swarm size.
    pub ps: usize,
    /// Unification factor u_f in `[0, 1]`; 1 is purely global, 0 purely local.
    #[serde(rename = "u_f")]
    pub unification: f64,
    /// Stagnation count that triggers a velocity refresh.
    #[serde(rename = "rg")]
    pub refresh_gap: usize,
    /// Total criterion evaluations, including the initial swarm.
    pub max_fes: usize,
    /// Ring neighborhood radius.
    #[serde(rename = "neighborhood_radius")]
    pub radius: usize,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self { ps: 30, unification: 0.4, refresh_gap: 20, max_fes: 6000, radius: 1 }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ps < 3 {
            return Err(Error::InvalidConfig(format!("swarm size {} < 3", self.ps)));
        }
        if !(0.0..=1.0).contains(&self.unification) {
            return Err(Error::InvalidConfig(format!("unification factor {} outside [0, 1]", self.unification)));
        }
        if self.refresh_gap == 0 || self.radius == 0 {
            return Err(Error::InvalidConfig("refresh gap and neighborhood radius must be positive".into()));
        }
        if self.max_fes < self.ps {
            return Err(Error::InvalidConfig(format!("budget {} below swarm size {}", self.max_fes, self.ps)));
        }
        Ok(())
    }
}

/// Complete state of one particle.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleState {
    pub position: StructureMask,
    pub velocity: VelocityState,
    pub pbest: StructureMask,
    pub pbest_value: f64,
    /// Index of the best particle in the ring neighborhood.
    pub nbest: usize,
    /// Consecutive iterations without personal improvement.
    pub stagnation: usize,
    /// Criterion of the current and previous positions.
    pub value: f64,
    pub previous_value: Option<f64>,
}

fn random_mask<R: Rng>(n: usize, rng: &mut R) -> StructureMask {
    StructureMask::from_bools((0..n).map(|_| rng.gen_bool(0.5)).collect())
}

fn evaluate_all<F: Fitness + ?Sized>(fitness: &F, masks: &[&StructureMask]) -> Vec<f64> {
    masks.par_iter().map(|m| fitness.evaluate(m)).collect()
}

/// Lowest value wins; ties go to the lowest index.
fn argmin(values: impl Iterator<Item = (usize, f64)>) -> usize {
    let mut best = (usize::MAX, f64::INFINITY);
    for (i, v) in values {
        if best.0 == usize::MAX || v < best.1 || (v == best.1 && i < best.0) {
            best = (i, v);
        }
    }
    best.0
}

fn neighborhood_best(particles: &[ParticleState], i: usize, radius: usize) -> usize {
    let ps = particles.len();
    if 2 * radius + 1 >= ps {
        return argmin(particles.iter().map(|p| p.pbest_value).enumerate());
    }
    let members = (0..=2 * radius).map(|o| (i + ps + o - radius) % ps);
    argmin(members.map(|j| (j, particles[j].pbest_value)))
}

/// Swarm state advanced one iteration at a time.
#[derive(Debug, Clone)]
pub struct Swarm {
    config: SwarmConfig,
    rng: ChaCha8Rng,
    particles: Vec<ParticleState>,
    gbest: usize,
    fes: usize,
    iteration: usize,
    trace: Vec<TraceEntry>,
}

impl Swarm {
    /// Random initial swarm, evaluated once per particle.
    pub fn new<F: Fitness + ?Sized>(fitness: &F, config: SwarmConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let n = fitness.dimension();
        if n == 0 {
            return Err(Error::Degenerate("empty model set"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init: Vec<(StructureMask, VelocityState)> = (0..config.ps)
            .map(|_| {
                let x = random_mask(n, &mut rng);
                (x, VelocityState::random(n, &mut rng))
            })
            .collect();
        let values = evaluate_all(fitness, &init.iter().map(|(x, _)| x).collect::<Vec<_>>());
        let particles = init
            .into_iter()
            .zip(values)
            .map(|((position, velocity), value)| ParticleState {
                pbest: position.clone(),
                position,
                velocity,
                pbest_value: value,
                nbest: 0,
                stagnation: 0,
                value,
                previous_value: None,
            })
            .collect();
        let fes = config.ps;
        let mut swarm = Self { config, rng, particles, gbest: 0, fes, iteration: 0, trace: Vec::new() };
        swarm.refresh_bests();
        swarm.record();
        Ok(swarm)
    }

    fn refresh_bests(&mut self) {
        self.gbest = argmin(self.particles.iter().map(|p| p.pbest_value).enumerate());
        for i in 0..self.particles.len() {
            self.particles[i].nbest = neighborhood_best(&self.particles, i, self.config.radius);
        }
    }

    fn record(&mut self) {
        let best = &self.particles[self.gbest];
        self.trace.push(TraceEntry {
            iter: self.iteration,
            criterion: best.pbest_value,
            xi: best.pbest.cardinality(),
        });
    }

    pub fn particles(&self) -> &[ParticleState] {
        &self.particles
    }

    pub fn best(&self) -> (&StructureMask, f64) {
        let p = &self.particles[self.gbest];
        (&p.pbest, p.pbest_value)
    }

    pub fn fes_used(&self) -> usize {
        self.fes
    }

    pub fn is_exhausted(&self) -> bool {
        self.fes >= self.config.max_fes
    }

    /// One iteration. When the budget cannot cover the whole swarm, only the
    /// leading particles move. Returns false once the budget is spent.
    pub fn step<F: Fitness + ?Sized>(&mut self, fitness: &F) -> bool {
        let active = self.config.ps.min(self.config.max_fes - self.fes);
        if active == 0 {
            return false;
        }
        let n = fitness.dimension();
        let swarm_values: Vec<f64> = self.particles.iter().map(|p| p.value).collect();
        let gbest = self.particles[self.gbest].pbest.clone();
        for i in 0..active {
            let refresh = self.particles[i].stagnation >= self.config.refresh_gap;
            if refresh {
                self.particles[i].velocity = VelocityState::random(n, &mut self.rng);
                self.particles[i].stagnation = 0;
            }
            let nbest = self.particles[self.particles[i].nbest].pbest.clone();
            let p = &mut self.particles[i];
            let personal = extract_learning_set(&p.pbest, &p.position).expect("sized masks");
            let global = extract_learning_set(&gbest, &p.position).expect("sized masks");
            let neighborhood = extract_learning_set(&nbest, &p.position).expect("sized masks");
            let own = extract_self_learning_set(&p.position);
            let delta = compute_delta(p.value, p.previous_value, &swarm_values);
            let sets = Exemplars { personal: &personal, global: &global, neighborhood: &neighborhood, own: &own };
            update_velocity(&mut p.velocity, sets, self.config.unification, delta, &mut self.rng);
            p.position = update_position(&p.velocity, &mut self.rng);
        }
        let values = evaluate_all(fitness, &self.particles[..active].iter().map(|p| &p.position).collect::<Vec<_>>());
        for (p, value) in self.particles.iter_mut().zip(values) {
            p.previous_value = Some(p.value);
            p.value = value;
            if value < p.pbest_value {
                p.pbest_value = value;
                p.pbest = p.position.clone();
            } else {
                p.stagnation += 1;
            }
        }
        self.fes += active;
        self.iteration += 1;
        self.refresh_bests();
        self.record();
        true
    }

    pub fn into_outcome(self) -> SearchResult {
        let best = &self.particles[self.gbest];
        SearchResult {
            best_mask: best.pbest.clone(),
            best_value: best.pbest_value,
            trace: self.trace,
            fes_used: self.fes,
        }
    }
}

/// Runs the swarm until the evaluation budget is spent.
pub fn run_upso<F: Fitness + ?Sized>(fitness: &F, config: &SwarmConfig, seed: u64) -> Result<SearchResult> {
    let mut swarm = Swarm::new(fitness, config.clone(), seed)?;
    while swarm.step(fitness) {}
    Ok(swarm.into_outcome())
}

/// Identifies a model for `dataset` by swarm search over the terms of `model_set`.
pub fn run_search<T: Scalar>(
    dataset: &Dataset<T>,
    model_set: &ModelSet,
    config: &SwarmConfig,
    seed: u64,
) -> Result<RunReport> {
    let evaluator = BicEvaluator::new(model_set, dataset)?;
    let outcome = run_upso(&evaluator, config, seed)?;
    let config_json = serde_json::to_value(config).expect("config serializes");
    Ok(RunReport::from_outcome("2d-upso", seed, config_json, outcome, &evaluator))
}
