//! The hybrid evolutionary loop with surrogate fitness approximation, plus
//! a plain exact-evaluation baseline for measuring what the surrogate saves.
//!
//! One iteration: random parent selection, CX crossover gated by the
//! adaptive crossover probability, repair, dedup into a candidate
//! population, adaptive swap mutation with dedup, surrogate scoring, local
//! search around the predicted best, exact evaluation of the predicted
//! elite, surrogate retraining, elitist merge selection, restart check.
//!
//! The global best is only ever updated from exactly evaluated individuals.
//! Two RNG substreams keep the genetic decisions independent of surrogate
//! initialization, so the baseline and the surrogate-assisted mode make
//! identical genetic draws for the same seed.

use crate::error::{Error, Result};
use crate::evaluator::{evaluate_exact, ExactFitness};
use crate::heuristics::{cbr, mih_with, rounding_heuristic, DepotIndexPolicy};
use crate::instance::{Individual, Instance};
use crate::rng::{ChaChaSampler, Sampler};
use crate::search::{
    adaptive_pc, adaptive_pm, cx_crossover, local_search, restart_check_pair,
    restart_replacement_count, restart_replacements, swap_mutation, LsCompare, OperatorConfig,
};
use crate::surrogate::{ElmConfig, ElmModel, FitnessEstimator, TrainingSet};
use crate::{Elm, Fitness, Money};
use std::cell::Cell;
use std::collections::HashSet;
use std::time::Instant;

const STREAM_GENETIC: u64 = 0;
const STREAM_SURROGATE: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Surrogate-assisted: only elites and the local-search winner are
    /// evaluated exactly.
    HeaFa,
    /// Every candidate evaluated exactly; no surrogate, no local search.
    BaselineGa,
}

/// What backs the fitness estimates in `HeaFa` mode. The exact oracle
/// exists for diagnostics and dependency-injection tests; it makes the
/// "surrogate" perfect at the price of exact evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateKind {
    Elm,
    ExactOracle,
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    /// Stop after this many consecutive iterations without improvement.
    pub max_stall: usize,
    /// Elites evaluated exactly per iteration.
    pub elite_count: usize,
    pub seed: u64,
    pub mode: Mode,
    pub operators: OperatorConfig,
    pub elm: ElmConfig,
    pub surrogate_kind: SurrogateKind,
    pub use_local_search: bool,
    pub ls_compare: LsCompare,
    pub depot_index_policy: DepotIndexPolicy,
}

impl EngineConfig {
    /// 10% of the population, rounded half-up, at least one.
    pub fn default_elite_count(population_size: usize) -> usize {
        ((population_size + 5) / 10).max(1)
    }

    pub fn new(seed: u64) -> Self {
        Self {
            population_size: 60,
            max_iterations: 200,
            max_stall: 50,
            elite_count: Self::default_elite_count(60),
            seed,
            mode: Mode::HeaFa,
            operators: OperatorConfig::default(),
            elm: ElmConfig::default(),
            surrogate_kind: SurrogateKind::Elm,
            use_local_search: true,
            ls_compare: LsCompare::Surrogate,
            depot_index_policy: DepotIndexPolicy::OpenPlants,
        }
    }

    /// Set the population size and re-derive the elite count.
    pub fn with_population_size(mut self, population_size: usize) -> Self {
        self.population_size = population_size;
        self.elite_count = Self::default_elite_count(population_size);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 {
            return Err(Error::InvalidConfig("population size must be >= 4".into()));
        }
        if self.elite_count < 1 || self.elite_count > self.population_size {
            return Err(Error::InvalidConfig(
                "elite count must be in 1..=population size".into(),
            ));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max iterations must be >= 1".into()));
        }
        if self.max_stall < 1 {
            return Err(Error::InvalidConfig("stall limit must be >= 1".into()));
        }
        self.operators.validate()
    }
}

/// Result of one engine run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub best_individual: Individual,
    /// Exact objective of `best_individual`.
    pub best_objective: Money,
    /// Global best after each iteration; non-increasing.
    pub objective_trace: Vec<Money>,
    pub exact_eval_count: usize,
    pub surrogate_eval_count: usize,
    pub iterations_run: usize,
    pub restarts: usize,
    pub wall_time_seconds: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct Scored {
    ind: Individual,
    fitness: Fitness,
    /// Present iff the fitness is an exact objective.
    objective: Option<Money>,
}

impl Scored {
    fn is_exact(&self) -> bool {
        self.objective.is_some()
    }
}

/// Estimator wrapper that counts how many scores it serves.
struct CountingEstimator<'e> {
    inner: &'e dyn FitnessEstimator,
    served: Cell<usize>,
}

impl FitnessEstimator for CountingEstimator<'_> {
    fn estimate(&self, ind: &Individual) -> f64 {
        self.served.set(self.served.get() + 1);
        self.inner.estimate(ind)
    }
}

/// Run with the mode taken from the configuration.
pub fn run(inst: &Instance, cfg: &EngineConfig) -> Result<RunReport> {
    cfg.validate()?;
    Engine::new(inst, cfg.clone()).run()
}

/// Surrogate-assisted run (forces `Mode::HeaFa`).
pub fn hea_fa_run(inst: &Instance, cfg: &EngineConfig) -> Result<RunReport> {
    let mut cfg = cfg.clone();
    cfg.mode = Mode::HeaFa;
    run(inst, &cfg)
}

/// Exact-evaluation baseline (forces `Mode::BaselineGa`).
pub fn baseline_ga_run(inst: &Instance, cfg: &EngineConfig) -> Result<RunReport> {
    let mut cfg = cfg.clone();
    cfg.mode = Mode::BaselineGa;
    run(inst, &cfg)
}

struct Engine<'a> {
    inst: &'a Instance,
    cfg: EngineConfig,
    genetic_rng: ChaChaSampler,
    surrogate_rng: ChaChaSampler,
    training: TrainingSet<Fitness>,
    estimator: Option<Box<dyn FitnessEstimator + 'a>>,
    exact_evals: usize,
    surrogate_evals: usize,
    restarts: usize,
}

impl<'a> Engine<'a> {
    fn new(inst: &'a Instance, cfg: EngineConfig) -> Self {
        let seed = cfg.seed;
        Self {
            inst,
            cfg,
            genetic_rng: ChaChaSampler::new(seed, STREAM_GENETIC),
            surrogate_rng: ChaChaSampler::new(seed, STREAM_SURROGATE),
            training: TrainingSet::new(),
            estimator: None,
            exact_evals: 0,
            surrogate_evals: 0,
            restarts: 0,
        }
    }

    fn surrogate_assisted(&self) -> bool {
        self.cfg.mode == Mode::HeaFa
    }

    fn repair(&self, ind: &Individual) -> Individual {
        mih_with(self.inst, ind, self.cfg.depot_index_policy)
    }

    /// Exact evaluation with bookkeeping: counts the call and, when an ELM
    /// is in play, feeds the sample to its training set.
    fn exact_fitness(&mut self, ind: &Individual) -> Result<(Fitness, Money)> {
        let sol = evaluate_exact(self.inst, ind)?;
        self.exact_evals += 1;
        if self.surrogate_assisted() && self.cfg.surrogate_kind == SurrogateKind::Elm {
            self.training.upsert(ind, sol.objective as Fitness)?;
        }
        Ok((sol.objective as Fitness, sol.objective))
    }

    fn estimate(&mut self, ind: &Individual) -> Fitness {
        self.surrogate_evals += 1;
        self.estimator
            .as_deref()
            .expect("estimator initialized before use")
            .estimate(ind)
    }

    fn retrain(&mut self) -> Result<()> {
        match self.cfg.surrogate_kind {
            SurrogateKind::ExactOracle => {
                if self.estimator.is_none() {
                    self.estimator = Some(Box::new(ExactFitness::new(self.inst)));
                }
            }
            SurrogateKind::Elm => {
                let n = self.inst.mask_len();
                let h = self.cfg.elm.hidden_count(n, self.training.len());
                let mut model: Elm = ElmModel::init(n, h, &mut self.surrogate_rng)?
                    .with_activation(self.cfg.elm.activation);
                model.train(&self.training)?;
                self.estimator = Some(Box::new(model));
            }
        }
        Ok(())
    }

    fn run(mut self) -> Result<RunReport> {
        let started = Instant::now();
        let np = self.cfg.population_size;
        let (n_plants, n_depots) = (self.inst.n_plants, self.inst.n_depots);

        // Initial pool: the two constructive heuristics plus random masks,
        // everything repaired, everything evaluated exactly.
        let mut masks: Vec<Individual> = Vec::with_capacity(2 * np);
        masks.push(self.repair(&cbr(self.inst)));
        masks.push(rounding_heuristic(self.inst)?);
        while masks.len() < 2 * np {
            let raw = Individual::random(&mut self.genetic_rng, n_plants, n_depots);
            masks.push(self.repair(&raw));
        }
        let mut pool: Vec<Scored> = Vec::with_capacity(masks.len());
        for ind in masks {
            let (fitness, objective) = self.exact_fitness(&ind)?;
            pool.push(Scored {
                ind,
                fitness,
                objective: Some(objective),
            });
        }
        if self.surrogate_assisted() {
            self.retrain()?;
        }

        let mut best = pool
            .iter()
            .min_by_key(|s| s.objective.expect("initial pool is exact"))
            .cloned()
            .expect("pool nonempty");
        let mut population = select_best(pool, np);

        let mut trace: Vec<Money> = Vec::new();
        let mut iteration = 1usize;
        let mut stall = 0usize;
        while iteration <= self.cfg.max_iterations && stall < self.cfg.max_stall {
            // Stored estimates go stale as the model is retrained; refresh
            // every non-exact fitness against the current model.
            if self.surrogate_assisted() {
                let estimator = self
                    .estimator
                    .as_deref()
                    .expect("estimator initialized before the loop");
                for member in population.iter_mut() {
                    if !member.is_exact() {
                        member.fitness = estimator.estimate(&member.ind);
                        self.surrogate_evals += 1;
                    }
                }
            }
            let f_best = population
                .iter()
                .map(|s| s.fitness)
                .fold(f64::INFINITY, f64::min);
            let f_bar =
                population.iter().map(|s| s.fitness).sum::<f64>() / population.len() as f64;

            // Crossover into the candidate population, duplicates excluded.
            let mut candidates: Vec<Scored> = Vec::with_capacity(np);
            for _ in 0..np {
                let pa = &population[self.genetic_rng.below(np)];
                let pb_idx = self.genetic_rng.below(np);
                let pb = &population[pb_idx];
                let f_prime = pa.fitness.min(pb.fitness);
                let pc = adaptive_pc(f_best, f_bar, f_prime, &self.cfg.operators);
                let raw = if self.genetic_rng.unit() < pc {
                    let (a, b) = (pa.ind.clone(), pb.ind.clone());
                    cx_crossover(&a, &b, &mut self.genetic_rng)?
                } else if pa.fitness <= pb.fitness {
                    pa.ind.clone()
                } else {
                    pb.ind.clone()
                };
                let child = self.repair(&raw);
                if candidates.iter().any(|s| s.ind == child) {
                    continue;
                }
                let scored = self.score_candidate(child)?;
                candidates.push(scored);
            }

            // Adaptive mutation in place, duplicates excluded.
            for i in 0..candidates.len() {
                let pm = adaptive_pm(f_best, f_bar, candidates[i].fitness, &self.cfg.operators);
                if self.genetic_rng.unit() >= pm {
                    continue;
                }
                let mutated_raw = swap_mutation(&candidates[i].ind, &mut self.genetic_rng);
                let mutated = self.repair(&mutated_raw);
                if mutated == candidates[i].ind
                    || candidates.iter().any(|s| s.ind == mutated)
                {
                    continue;
                }
                candidates[i] = self.score_candidate(mutated)?;
            }

            // Exactly evaluated candidates this iteration; the best of them
            // may become the new global best.
            let mut evaluated_slots: Vec<usize> = Vec::new();

            let best_slot = argmin_fitness(&candidates);
            if self.surrogate_assisted() && self.cfg.use_local_search {
                let winner_slot = self.improve_locally(&mut candidates, best_slot);
                let (fitness, objective) = self.exact_fitness(&candidates[winner_slot].ind)?;
                candidates[winner_slot].fitness = fitness;
                candidates[winner_slot].objective = Some(objective);
                evaluated_slots.push(winner_slot);
            }

            if self.surrogate_assisted() {
                // Elites by estimated rank get the exact treatment and feed
                // the training set.
                let mut order: Vec<usize> = (0..candidates.len()).collect();
                order.sort_by(|&x, &y| {
                    candidates[x]
                        .fitness
                        .partial_cmp(&candidates[y].fitness)
                        .expect("finite fitness")
                        .then(x.cmp(&y))
                });
                for &slot in order.iter().take(self.cfg.elite_count) {
                    if !candidates[slot].is_exact() {
                        let (fitness, objective) = self.exact_fitness(&candidates[slot].ind)?;
                        candidates[slot].fitness = fitness;
                        candidates[slot].objective = Some(objective);
                    }
                    evaluated_slots.push(slot);
                }
                self.retrain()?;
            } else {
                evaluated_slots.extend(0..candidates.len());
            }

            // Global best update from exact values only.
            let challenger = evaluated_slots
                .iter()
                .map(|&slot| &candidates[slot])
                .min_by_key(|s| s.objective.expect("evaluated slots are exact"));
            match challenger {
                Some(c) if c.objective < best.objective => {
                    best = c.clone();
                    stall = 0;
                }
                _ => stall += 1,
            }

            // Elitist merge selection.
            population.extend(candidates);
            population = select_best(population, np);

            // Restart when the population has collapsed onto one pattern.
            let converged = restart_check_pair(
                &population.first().expect("population nonempty").ind,
                &population.last().expect("population nonempty").ind,
            );
            if converged {
                let replace = restart_replacement_count(np).min(population.len());
                population.truncate(population.len() - replace);
                let fresh = restart_replacements(self.inst, replace, &mut self.genetic_rng);
                for ind in fresh {
                    let (fitness, objective) = self.exact_fitness(&ind)?;
                    population.push(Scored {
                        ind,
                        fitness,
                        objective: Some(objective),
                    });
                }
                population
                    .sort_by(|a, b| a.fitness.partial_cmp(&b.fitness).expect("finite fitness"));
                self.restarts += 1;
            }

            trace.push(best.objective.expect("global best is exact"));
            iteration += 1;
        }

        let best_objective = best.objective.expect("global best is exact");
        debug_assert_eq!(
            evaluate_exact(self.inst, &best.ind)?.objective,
            best_objective
        );
        Ok(RunReport {
            best_individual: best.ind,
            best_objective,
            objective_trace: trace,
            exact_eval_count: self.exact_evals,
            surrogate_eval_count: self.surrogate_evals,
            iterations_run: iteration - 1,
            restarts: self.restarts,
            wall_time_seconds: started.elapsed().as_secs_f64(),
            seed: self.cfg.seed,
        })
    }

    /// Fresh candidate scoring: estimated in surrogate mode, exact in the
    /// baseline.
    fn score_candidate(&mut self, ind: Individual) -> Result<Scored> {
        if self.surrogate_assisted() {
            let fitness = self.estimate(&ind);
            Ok(Scored {
                ind,
                fitness,
                objective: None,
            })
        } else {
            let (fitness, objective) = self.exact_fitness(&ind)?;
            Ok(Scored {
                ind,
                fitness,
                objective: Some(objective),
            })
        }
    }

    /// Local search around the candidate at `best_slot`; returns the slot
    /// holding the (possibly improved) winner.
    fn improve_locally(&mut self, candidates: &mut Vec<Scored>, best_slot: usize) -> usize {
        let incumbent = candidates[best_slot].clone();
        let counting = CountingEstimator {
            inner: self
                .estimator
                .as_deref()
                .expect("estimator initialized before local search"),
            served: Cell::new(0),
        };
        let improved = local_search(
            self.inst,
            &incumbent.ind,
            incumbent.fitness,
            &counting,
            self.cfg.ls_compare,
            self.cfg.depot_index_policy,
        );
        let served = counting.served.get();
        self.surrogate_evals += served;
        if improved == incumbent.ind {
            return best_slot;
        }
        if let Some(dup) = candidates.iter().position(|s| s.ind == improved) {
            // Already present elsewhere; drop the superseded incumbent.
            candidates.remove(best_slot);
            return if dup > best_slot { dup - 1 } else { dup };
        }
        let fitness = self.estimate(&improved);
        candidates[best_slot] = Scored {
            ind: improved,
            fitness,
            objective: None,
        };
        best_slot
    }
}

/// Best `keep` entries by fitness, preferring distinct masks. Duplicates
/// fill the tail only when the pool has fewer than `keep` distinct masks
/// (tiny instances may not offer more). Stable, so on equal fitness the
/// earlier entry wins.
fn select_best(mut pool: Vec<Scored>, keep: usize) -> Vec<Scored> {
    pool.sort_by(|a, b| a.fitness.partial_cmp(&b.fitness).expect("finite fitness"));
    let mut seen: HashSet<Individual> = HashSet::new();
    let mut chosen: Vec<Scored> = Vec::with_capacity(keep);
    let mut spares: Vec<Scored> = Vec::new();
    for s in pool {
        if chosen.len() == keep {
            break;
        }
        if seen.insert(s.ind.clone()) {
            chosen.push(s);
        } else {
            spares.push(s);
        }
    }
    if chosen.len() < keep {
        chosen.extend(spares.into_iter().take(keep - chosen.len()));
        chosen.sort_by(|a, b| a.fitness.partial_cmp(&b.fitness).expect("finite fitness"));
    }
    chosen
}

fn argmin_fitness(scored: &[Scored]) -> usize {
    scored
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.fitness.partial_cmp(&b.fitness).expect("finite fitness"))
        .map(|(i, _)| i)
        .expect("nonempty candidate population")
}
