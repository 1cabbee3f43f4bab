//! Genetic operators: CX crossover, segment swap mutation, adaptive
//! operator probabilities, inversion local search, and the restart strategy.
//!
//! Fitness is minimized throughout, so "better" means smaller.

use crate::error::{Error, Result};
use crate::heuristics::{mih_with, DepotIndexPolicy};
use crate::instance::{Individual, Instance};
use crate::rng::Sampler;
use crate::surrogate::FitnessEstimator;
use crate::Fitness;

/// Bounds for the adaptive crossover and mutation probabilities.
#[derive(Debug, Clone, Copy)]
pub struct OperatorConfig {
    pub pc_min: f64,
    pub pc_max: f64,
    pub pm_min: f64,
    pub pm_max: f64,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            pc_min: 0.5,
            pc_max: 0.9,
            pm_min: 0.01,
            pm_max: 0.2,
        }
    }
}

impl OperatorConfig {
    pub fn validate(&self) -> Result<()> {
        let band_ok = |lo: f64, hi: f64| (0.0..=1.0).contains(&lo) && lo <= hi && hi <= 1.0;
        if !band_ok(self.pc_min, self.pc_max) || !band_ok(self.pm_min, self.pm_max) {
            return Err(Error::InvalidConfig(
                "operator probability bounds must satisfy 0 <= min <= max <= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Adaptive probability shared by crossover and mutation: individuals at
/// least as bad as the population average get the maximum rate; better ones
/// scale linearly down to the minimum at the population best. The result is
/// clamped into `[lo, hi]` because `f` may be a surrogate estimate that
/// undershoots the exact `f_best`.
fn adaptive_probability(f_best: Fitness, f_bar: Fitness, f: Fitness, lo: f64, hi: f64) -> f64 {
    if f >= f_bar || f_best == f_bar {
        return hi;
    }
    let ratio = (f_best - f) / (f_best - f_bar);
    (lo + ratio * (hi - lo)).clamp(lo, hi)
}

/// Crossover probability for a parent pair; `f_prime` is the better (lower)
/// of the two parents' fitness values.
pub fn adaptive_pc(f_best: Fitness, f_bar: Fitness, f_prime: Fitness, cfg: &OperatorConfig) -> f64 {
    adaptive_probability(f_best, f_bar, f_prime, cfg.pc_min, cfg.pc_max)
}

/// Mutation probability; `f` is the fitness of the individual under mutation.
pub fn adaptive_pm(f_best: Fitness, f_bar: Fitness, f: Fitness, cfg: &OperatorConfig) -> f64 {
    adaptive_probability(f_best, f_bar, f, cfg.pm_min, cfg.pm_max)
}

/// CX recombination for binary masks: agreeing positions are inherited
/// directly, each disagreeing position comes from the first parent when the
/// uniform draw is below one half, otherwise from the second. Every
/// offspring allele is present in a parent at the same position.
pub fn cx_crossover(
    a: &Individual,
    b: &Individual,
    sampler: &mut impl Sampler,
) -> Result<Individual> {
    if a.plants.len() != b.plants.len() || a.depots.len() != b.depots.len() {
        return Err(Error::Validation(
            "crossover parents have different segment lengths".into(),
        ));
    }
    let mut child = a.clone();
    for k in 0..a.len() {
        let (av, bv) = (a.bit(k), b.bit(k));
        // The draw is consumed only at disagreeing positions.
        let value = if av == bv || sampler.unit() < 0.5 {
            av
        } else {
            bv
        };
        child.set_bit(k, value);
    }
    Ok(child)
}

/// Exchange two randomly chosen positions within the plant segment and,
/// independently, two within the depot segment. Segments shorter than two
/// are left untouched (and consume no draws). Swapping preserves the number
/// of open facilities per segment.
pub fn swap_mutation(ind: &Individual, sampler: &mut impl Sampler) -> Individual {
    let mut out = ind.clone();
    if out.plants.len() >= 2 {
        let (i, j) = sampler.distinct_pair(out.plants.len());
        out.plants.swap(i, j);
    }
    if out.depots.len() >= 2 {
        let (i, j) = sampler.distinct_pair(out.depots.len());
        out.depots.swap(i, j);
    }
    out
}

/// What the incumbent's side of the local-search comparison uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LsCompare {
    /// Score the incumbent with the same estimator as the candidates.
    Surrogate,
    /// Use the incumbent's known fitness value as passed by the caller.
    Mixed,
}

/// Inversion local search around `incumbent`: flip each position in turn,
/// repair, and keep the distinct repaired neighbors as candidates. The best
/// candidate by estimated fitness replaces the incumbent if it scores
/// better; otherwise the incumbent is returned unchanged.
pub fn local_search(
    inst: &Instance,
    incumbent: &Individual,
    incumbent_fitness: Fitness,
    estimator: &dyn FitnessEstimator,
    compare: LsCompare,
    depot_policy: DepotIndexPolicy,
) -> Individual {
    let mut candidates: Vec<Individual> = Vec::new();
    for k in 0..incumbent.len() {
        let mut neighbor = incumbent.clone();
        neighbor.flip_bit(k);
        let repaired = mih_with(inst, &neighbor, depot_policy);
        if repaired != *incumbent && !candidates.contains(&repaired) {
            candidates.push(repaired);
        }
    }
    debug_assert!(candidates.len() <= incumbent.len());
    if candidates.is_empty() {
        return incumbent.clone();
    }

    let scores = estimator.estimate_many(&candidates);
    let (best_at, best_score) = scores
        .iter()
        .enumerate()
        .min_by(|(_, x), (_, y)| x.partial_cmp(y).expect("finite fitness estimates"))
        .map(|(i, &s)| (i, s))
        .expect("candidates nonempty");

    let reference = match compare {
        LsCompare::Surrogate => estimator.estimate(incumbent),
        LsCompare::Mixed => incumbent_fitness,
    };
    if best_score < reference {
        candidates.swap_remove(best_at)
    } else {
        incumbent.clone()
    }
}

/// Number of positions where the two masks agree.
pub fn hamming_agreement(a: &Individual, b: &Individual) -> usize {
    (0..a.len()).filter(|&k| a.bit(k) == b.bit(k)).count()
}

/// Restart trigger: the best and worst individuals agree on at least 90% of
/// positions. Computed in integers (`10 * agree >= 9 * len`), so the
/// threshold is exact for any mask length.
pub fn restart_check_pair(best: &Individual, worst: &Individual) -> bool {
    10 * hamming_agreement(best, worst) >= 9 * best.len()
}

/// [`restart_check_pair`] over a population sorted best-first.
pub fn restart_check(pop: &[Individual]) -> bool {
    match (pop.first(), pop.last()) {
        (Some(best), Some(worst)) => restart_check_pair(best, worst),
        _ => false,
    }
}

/// How many individuals a restart replaces: 10% of the population, rounded
/// half-up, at least 1.
pub fn restart_replacement_count(pop_size: usize) -> usize {
    ((pop_size + 5) / 10).max(1)
}

/// Fresh random individuals, repaired to feasibility.
pub fn restart_replacements(
    inst: &Instance,
    count: usize,
    sampler: &mut impl Sampler,
) -> Vec<Individual> {
    (0..count)
        .map(|_| {
            let raw = Individual::random(sampler, inst.n_plants, inst.n_depots);
            mih_with(inst, &raw, DepotIndexPolicy::OpenPlants)
        })
        .collect()
}

/// Replace the worst 10% of a population (sorted best-first) with fresh
/// random repaired individuals.
pub fn restart(pop: &mut Vec<Individual>, inst: &Instance, sampler: &mut impl Sampler) {
    let replace = restart_replacement_count(pop.len()).min(pop.len());
    let keep = pop.len() - replace;
    pop.truncate(keep);
    pop.extend(restart_replacements(inst, replace, sampler));
}
