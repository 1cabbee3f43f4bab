//! Exact objective evaluation, the LP-relaxation lower bound, and RPD.
//!
//! Exact evaluation restricts the network to the open facilities and solves
//! it with integer costs, so the objective is exact to the last unit. The
//! lower bound solves the full network with fixed costs folded into the
//! unit costs (`c + f/b`, `d + g/p`) using rational arithmetic: for
//! continuous `y`, `z` the optimal opening levels are exactly the capacity
//! utilizations, so the folded-cost flow optimum equals the relaxation
//! optimum with the variable upper-bound constraint dropped. Dropping that
//! constraint can only lower the bound, which therefore stays valid.

use crate::error::{Error, Result, Stage};
use crate::flow::{min_cost_flow, FlowPlan, LayeredNetwork};
use crate::instance::{Individual, Instance};
use crate::matrix::Matrix;
use crate::surrogate::FitnessEstimator;
use crate::{Money, Rational};
use num_traits::ToPrimitive;

/// An individual together with its exactly computed objective and the flows
/// realizing it.
#[derive(Debug, Clone)]
pub struct EvaluatedSolution {
    pub individual: Individual,
    /// Total cost `Z`: fixed opening costs plus transport cost.
    pub objective: Money,
    pub flows: FlowPlan<Money>,
    /// Always true for this evaluator; distinguishes exact values from
    /// surrogate estimates downstream.
    pub exact: bool,
}

fn open_indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, open)| **open)
        .map(|(i, _)| i)
        .collect()
}

/// Network restricted to the facilities opened by `ind`, with original unit
/// costs.
fn restricted_network(inst: &Instance, ind: &Individual) -> LayeredNetwork<Money> {
    let plant_ids = open_indices(&ind.plants);
    let depot_ids = open_indices(&ind.depots);
    let supply_costs = Matrix::from_fn(plant_ids.len(), depot_ids.len(), |i, j| {
        *inst.supply_cost.get(plant_ids[i], depot_ids[j])
    });
    let delivery_costs = Matrix::from_fn(depot_ids.len(), inst.n_customers, |j, k| {
        *inst.delivery_cost.get(depot_ids[j], k)
    });
    LayeredNetwork {
        n_plants_total: inst.n_plants,
        n_depots_total: inst.n_depots,
        n_customers: inst.n_customers,
        plant_caps: plant_ids.iter().map(|&i| inst.plant_capacity[i]).collect(),
        depot_caps: depot_ids.iter().map(|&j| inst.depot_capacity[j]).collect(),
        plant_ids,
        depot_ids,
        supply_costs,
        delivery_costs,
        demands: inst.demand.clone(),
    }
}

/// Exact objective for an open/close mask. The individual must open enough
/// capacity at both stages; repair first (see the heuristics module) if it
/// may not.
pub fn evaluate_exact(inst: &Instance, ind: &Individual) -> Result<EvaluatedSolution> {
    let need = inst.total_demand();
    let plant_open = ind.open_plant_capacity(inst);
    if plant_open < need {
        return Err(Error::CapacityShortfall {
            stage: Stage::Plant,
            opened: plant_open,
            demand: need,
        });
    }
    let depot_open = ind.open_depot_capacity(inst);
    if depot_open < need {
        return Err(Error::CapacityShortfall {
            stage: Stage::Depot,
            opened: depot_open,
            demand: need,
        });
    }

    let net = restricted_network(inst, ind);
    let flows = min_cost_flow(&net)?;
    debug_assert_eq!(flows.total_first_stage(), need);
    debug_assert_eq!(flows.total_second_stage(), need);

    let fixed: Money = ind
        .plants
        .iter()
        .zip(&inst.plant_fixed_cost)
        .filter(|(open, _)| **open)
        .map(|(_, cost)| *cost)
        .sum::<Money>()
        + ind
            .depots
            .iter()
            .zip(&inst.depot_fixed_cost)
            .filter(|(open, _)| **open)
            .map(|(_, cost)| *cost)
            .sum::<Money>();

    Ok(EvaluatedSolution {
        individual: ind.clone(),
        objective: fixed + flows.cost,
        flows,
        exact: true,
    })
}

/// Full network with fixed costs folded into the unit costs, solved in
/// exact rational arithmetic. The plan's flows are the relaxation's flows;
/// its cost is the relaxation optimum.
pub fn lp_relaxation(inst: &Instance) -> Result<FlowPlan<Rational>> {
    let rat = |v: Money| Rational::from_integer(v.into());
    let supply_costs = Matrix::from_fn(inst.n_plants, inst.n_depots, |i, j| {
        rat(*inst.supply_cost.get(i, j))
            + Rational::new(inst.plant_fixed_cost[i].into(), inst.plant_capacity[i].into())
    });
    let delivery_costs = Matrix::from_fn(inst.n_depots, inst.n_customers, |j, k| {
        rat(*inst.delivery_cost.get(j, k))
            + Rational::new(inst.depot_fixed_cost[j].into(), inst.depot_capacity[j].into())
    });
    let net = LayeredNetwork {
        n_plants_total: inst.n_plants,
        n_depots_total: inst.n_depots,
        n_customers: inst.n_customers,
        plant_ids: (0..inst.n_plants).collect(),
        depot_ids: (0..inst.n_depots).collect(),
        plant_caps: inst.plant_capacity.clone(),
        depot_caps: inst.depot_capacity.clone(),
        supply_costs,
        delivery_costs,
        demands: inst.demand.clone(),
    };
    min_cost_flow(&net)
}

/// LP-relaxation lower bound as an exact rational.
pub fn lp_lower_bound_exact(inst: &Instance) -> Result<Rational> {
    Ok(lp_relaxation(inst)?.cost)
}

/// LP-relaxation lower bound for reporting (callers print it to 1 decimal).
pub fn lp_lower_bound(inst: &Instance) -> Result<f64> {
    let exact = lp_lower_bound_exact(inst)?;
    exact
        .to_f64()
        .ok_or_else(|| Error::Domain("lower bound does not fit in f64".into()))
}

/// Relative percentage deviation `(z_alg - z_lb) * 100 / z_lb`.
pub fn rpd(z_alg: f64, z_lb: f64) -> Result<f64> {
    if z_lb <= 0.0 {
        return Err(Error::Domain(format!(
            "rpd needs a positive lower bound, got {z_lb}"
        )));
    }
    Ok((z_alg - z_lb) * 100.0 / z_lb)
}

/// Fitness estimator that is not an estimator at all: it evaluates exactly.
/// Used for the baseline mode and for isolating the engine from surrogate
/// error in tests.
pub struct ExactFitness<'a> {
    inst: &'a Instance,
}

impl<'a> ExactFitness<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        Self { inst }
    }
}

impl FitnessEstimator for ExactFitness<'_> {
    fn estimate(&self, ind: &Individual) -> f64 {
        match evaluate_exact(self.inst, ind) {
            Ok(sol) => sol.objective as f64,
            Err(_) => f64::INFINITY,
        }
    }
}
