//! Generational binary genetic algorithm.

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
pub struct GaConfig {
    pub population: usize,
    /// Crossover probability.
    pub p_c: f64,
    /// Per-bit mutation probability.
    pub p_m: f64,
    pub max_fes: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self { population: 30, p_c: 0.8, p_m: 0.1, max_fes: 6000 }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::InvalidConfig(format!("population {} < 2", self.population)));
        }
        if !(0.0..=1.0).contains(&self.p_c) || !(0.0..=1.0).contains(&self.p_m) {
            return Err(Error::InvalidConfig("probabilities must lie in [0, 1]".into()));
        }
        if self.max_fes < self.population {
            return Err(Error::InvalidConfig(format!("budget {} below population {}", self.max_fes, self.population)));
        }
        Ok(())
    }
}

fn tournament<'a, R: Rng>(pop: &'a [(StructureMask, f64)], rng: &mut R) -> &'a StructureMask {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    if pop[b].1 < pop[a].1 {
        &pop[b].0
    } else {
        &pop[a].0
    }
}

fn best_of(pop: &[(StructureMask, f64)]) -> usize {
    let mut best = 0;
    for (i, (_, v)) in pop.iter().enumerate() {
        if *v < pop[best].1 {
            best = i;
        }
    }
    best
}

/// Evolves `initial` (or a random population at bit density 0.5 when `None`)
/// until the budget is spent.
pub fn evolve<F: Fitness + ?Sized>(
    fitness: &F,
    config: &GaConfig,
    initial: Option<Vec<StructureMask>>,
    seed: u64,
) -> Result<SearchResult> {
    config.validate()?;
    let n = fitness.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masks = match initial {
        Some(m) if m.len() != config.population || m.iter().any(|x| x.len() != n) => {
            return Err(Error::InvalidConfig("initial population does not match the configuration".into()))
        }
        Some(m) => m,
        None => (0..config.population)
            .map(|_| StructureMask::from_bools((0..n).map(|_| rng.gen_bool(0.5)).collect()))
            .collect(),
    };
    let values: Vec<f64> = masks.par_iter().map(|m| fitness.evaluate(m)).collect();
    let mut pop: Vec<(StructureMask, f64)> = masks.into_iter().zip(values).collect();
    let mut fes = config.population;
    let mut trace = Vec::new();
    let mut push = |iter: usize, pop: &[(StructureMask, f64)]| {
        let b = &pop[best_of(pop)];
        trace.push(TraceEntry { iter, criterion: b.1, xi: b.0.cardinality() });
    };
    push(0, &pop);
    let mut generation = 0;
    while fes < config.max_fes {
        let children_n = (config.population - 1).min(config.max_fes - fes);
        let children: Vec<StructureMask> = (0..children_n)
            .map(|_| {
                let a = tournament(&pop, &mut rng).clone();
                let b = tournament(&pop, &mut rng);
                let mut child = a;
                if rng.gen_bool(config.p_c) {
                    for i in 0..n {
                        if rng.gen_bool(0.5) {
                            child.set(i, b.get(i));
                        }
                    }
                }
                for i in 0..n {
                    if rng.gen_bool(config.p_m) {
                        child.set(i, !child.get(i));
                    }
                }
                child
            })
            .collect();
        let values: Vec<f64> = children.par_iter().map(|m| fitness.evaluate(m)).collect();
        fes += children_n;
        let elite = pop.swap_remove(best_of(&pop));
        let mut next = vec![elite];
        next.extend(children.into_iter().zip(values));
        if next.len() < config.population {
            pop.sort_by(|a, b| a.1.total_cmp(&b.1));
            next.extend(pop.drain(..config.population - next.len()));
        }
        pop = next;
        generation += 1;
        push(generation, &pop);
    }
    let b = pop.swap_remove(best_of(&pop));
    Ok(SearchResult { best_mask: b.0, best_value: b.1, trace, fes_used: fes })
}

pub fn run_ga<T: Scalar>(dataset: &Dataset<T>, model_set: &ModelSet, config: &GaConfig, seed: u64) -> Result<RunReport> {
    let evaluator = BicEvaluator::new(model_set, dataset)?;
    let outcome = evolve(&evaluator, config, None, seed)?;
    let config_json = serde_json::to_value(config).expect("config serializes");
    Ok(RunReport::from_outcome("ga", seed, config_json, outcome, &evaluator))
}
