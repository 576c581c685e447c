//! Two-row velocity: cardinality likelihoods and term likelihoods.

use rand::Rng;

use crate::narx::StructureMask;
use crate::search::learning::LearningSet;

/// Nonnegative `2 × N_t` likelihood matrix of one particle.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityState {
    /// `cardinality[m]` is the likelihood of choosing `m + 1` terms.
    pub cardinality: Vec<f64>,
    /// `terms[m]` is the likelihood of including term `m`.
    pub terms: Vec<f64>,
}

impl VelocityState {
    pub fn new(cardinality: Vec<f64>, terms: Vec<f64>) -> Self {
        assert_eq!(cardinality.len(), terms.len());
        Self { cardinality, terms }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![0.0; len], vec![0.0; len])
    }

    /// Every entry i.i.d. uniform on `[0, 1)`.
    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let cardinality = (0..len).map(|_| rng.gen::<f64>()).collect();
        let terms = (0..len).map(|_| rng.gen::<f64>()).collect();
        Self { cardinality, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn row_mut(&mut self, row: usize) -> &mut [f64] {
        if row == 0 {
            &mut self.cardinality
        } else {
            &mut self.terms
        }
    }
}

/// Fitness feedback for the self-learning set.
///
/// When the particle improved (`current < previous`), returns its normalized rank
/// within `swarm`, `(max − current) / (max − min)`; otherwise 0. A swarm with
/// identical fitness values also yields 0.
pub fn compute_delta(current: f64, previous: Option<f64>, swarm: &[f64]) -> f64 {
    let Some(previous) = previous else { return 0.0 };
    if !(current < previous) || swarm.is_empty() {
        return 0.0;
    }
    let max = swarm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = swarm.iter().copied().fold(f64::INFINITY, f64::min);
    let span = max - min;
    if !(span > 0.0) {
        return 0.0;
    }
    ((max - current) / span).clamp(0.0, 1.0)
}

/// Element-wise random weights `r₁, r₂, r₃ ∈ [0, 2]` for one velocity update.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityWeights {
    pub personal: VelocityState,
    pub global: VelocityState,
    pub neighborhood: VelocityState,
}

impl VelocityWeights {
    pub fn sample<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut draw = || {
            let c = (0..len).map(|_| rng.gen_range(0.0..=2.0)).collect();
            let t = (0..len).map(|_| rng.gen_range(0.0..=2.0)).collect();
            VelocityState::new(c, t)
        };
        let personal = draw();
        let global = draw();
        let neighborhood = draw();
        Self { personal, global, neighborhood }
    }
}

/// Exemplar learning sets feeding one velocity update.
#[derive(Debug, Clone, Copy)]
pub struct Exemplars<'a> {
    pub personal: &'a LearningSet,
    pub global: &'a LearningSet,
    pub neighborhood: &'a LearningSet,
    pub own: &'a LearningSet,
}

/// `V + r₁⊙L_p + u_f·r₂⊙L_g + (1 − u_f)·r₃⊙L_n + Δ·L_self` with given weights.
pub fn apply_velocity_update(
    velocity: &mut VelocityState,
    sets: Exemplars<'_>,
    weights: &VelocityWeights,
    unification: f64,
    delta: f64,
) {
    let n = velocity.len();
    for row in 0..2 {
        let pick = |l: &LearningSet, m: usize| {
            let bit = if row == 0 { l.cardinality_row()[m] } else { l.term_row().get(m) };
            if bit {
                1.0
            } else {
                0.0
            }
        };
        let w = |s: &VelocityState, m: usize| if row == 0 { s.cardinality[m] } else { s.terms[m] };
        let v = velocity.row_mut(row);
        for m in 0..n {
            v[m] += w(&weights.personal, m) * pick(sets.personal, m)
                + unification * w(&weights.global, m) * pick(sets.global, m)
                + (1.0 - unification) * w(&weights.neighborhood, m) * pick(sets.neighborhood, m)
                + delta * pick(sets.own, m);
        }
    }
}

/// Velocity update with freshly drawn weights.
pub fn update_velocity<R: Rng>(
    velocity: &mut VelocityState,
    sets: Exemplars<'_>,
    unification: f64,
    delta: f64,
    rng: &mut R,
) {
    let weights = VelocityWeights::sample(velocity.len(), rng);
    apply_velocity_update(velocity, sets, &weights, unification, delta);
}

/// Roulette-wheel cardinality for a uniform draw `r ∈ [0, 1)`: the smallest
/// `k` (1-based) whose cumulative probability exceeds `r`.
pub fn roulette_cardinality(likelihoods: &[f64], r: f64) -> usize {
    let total: f64 = likelihoods.iter().sum();
    let mut cumulative = 0.0;
    for (m, &v) in likelihoods.iter().enumerate() {
        cumulative += v;
        if r < cumulative / total {
            return m + 1;
        }
    }
    // Rounding can leave the last cumulative probability just below 1.
    likelihoods.iter().rposition(|&v| v > 0.0).map_or(likelihoods.len(), |m| m + 1)
}

/// Mask of the `xi` terms with the largest likelihoods; ties go to the lower index.
pub fn top_terms(likelihoods: &[f64], xi: usize) -> StructureMask {
    let mut order: Vec<usize> = (0..likelihoods.len()).collect();
    order.sort_by(|&a, &b| likelihoods[b].total_cmp(&likelihoods[a]).then(a.cmp(&b)));
    StructureMask::from_indices(likelihoods.len(), &order[..xi.min(order.len())])
}

/// Position for a given roulette draw `r`: sample the cardinality, then take the
/// most likely terms.
pub fn position_from_draw(velocity: &VelocityState, r: f64) -> StructureMask {
    let xi = roulette_cardinality(&velocity.cardinality, r);
    top_terms(&velocity.terms, xi)
}

/// Two-stage position update.
pub fn update_position<R: Rng>(velocity: &VelocityState, rng: &mut R) -> StructureMask {
    position_from_draw(velocity, rng.gen::<f64>())
}
