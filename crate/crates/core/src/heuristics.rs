//! Constructive heuristics and the MIH repair/improvement pass.
//!
//! Facilities are ranked by a cost-benefit index: fixed cost plus related
//! transport cost, divided by capacity. Indices are kept as exact integer
//! ratios so rankings (and the documented lowest-id tie-break) never depend
//! on floating-point rounding.

use crate::error::Result;
use crate::evaluator::lp_relaxation;
use crate::instance::{Individual, Instance};
use crate::Units;
use std::cmp::Ordering;

/// Cost-to-capacity ratio of one facility; lower ranks first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostBenefitIndex {
    cost: i64,
    capacity: i64,
}

impl CostBenefitIndex {
    fn new(cost: i64, capacity: i64) -> Self {
        debug_assert!(capacity > 0);
        Self { cost, capacity }
    }

    pub fn value(&self) -> f64 {
        self.cost as f64 / self.capacity as f64
    }
}

impl PartialOrd for CostBenefitIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CostBenefitIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        // a/b vs c/d with positive denominators: compare a*d vs c*b.
        let left = self.cost as i128 * other.capacity as i128;
        let right = other.cost as i128 * self.capacity as i128;
        left.cmp(&right)
    }
}

/// `(f_i + sum_j c_ij) / b_i` for every plant.
pub fn plant_indices(inst: &Instance) -> Vec<CostBenefitIndex> {
    (0..inst.n_plants)
        .map(|i| {
            let transport: i64 = inst.supply_cost.row(i).iter().sum();
            CostBenefitIndex::new(inst.plant_fixed_cost[i] + transport, inst.plant_capacity[i])
        })
        .collect()
}

/// Which plants contribute to a depot's inbound-transport term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepotIndexPolicy {
    /// Sum `c_ij` over every plant (the construction-time formula).
    AllPlants,
    /// Sum `c_ij` over currently open plants only (the repair-time formula).
    OpenPlants,
}

/// `(sum_i c_ij + g_j + sum_k d_jk) / p_j` for every depot, with the inbound
/// sum restricted according to `policy`.
pub fn depot_indices(
    inst: &Instance,
    plants_open: &[bool],
    policy: DepotIndexPolicy,
) -> Vec<CostBenefitIndex> {
    (0..inst.n_depots)
        .map(|j| {
            let inbound: i64 = (0..inst.n_plants)
                .filter(|&i| match policy {
                    DepotIndexPolicy::AllPlants => true,
                    DepotIndexPolicy::OpenPlants => plants_open[i],
                })
                .map(|i| *inst.supply_cost.get(i, j))
                .sum();
            let outbound: i64 = inst.delivery_cost.row(j).iter().sum();
            CostBenefitIndex::new(
                inbound + inst.depot_fixed_cost[j] + outbound,
                inst.depot_capacity[j],
            )
        })
        .collect()
}

/// Facility ids sorted by ascending index, ties broken by lower id.
fn ranked(indices: &[CostBenefitIndex]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..indices.len()).collect();
    order.sort_by(|&a, &b| indices[a].cmp(&indices[b]).then(a.cmp(&b)));
    order
}

/// Loop bound of the greedy opening phase: the construction heuristic opens
/// while `total <= need`, the repair pass only while `total < need`.
#[derive(Debug, Clone, Copy)]
enum Cover {
    Exceed,
    AtLeast,
}

fn open_greedy(mask: &mut [bool], caps: &[Units], order: &[usize], need: Units, cover: Cover) {
    let mut total: Units = mask
        .iter()
        .zip(caps)
        .filter(|(open, _)| **open)
        .map(|(_, c)| *c)
        .sum();
    let keep_opening = |total: Units| match cover {
        Cover::Exceed => total <= need,
        Cover::AtLeast => total < need,
    };
    for &id in order {
        if !keep_opening(total) {
            break;
        }
        if !mask[id] {
            mask[id] = true;
            total += caps[id];
        }
    }
}

/// Improvement phase: walk open facilities from the worst index downward,
/// closing each while capacity still covers demand; the first removal that
/// would break feasibility is reverted and ends the scan.
fn prune_worst(mask: &mut [bool], caps: &[Units], order: &[usize], need: Units) {
    let mut total: Units = mask
        .iter()
        .zip(caps)
        .filter(|(open, _)| **open)
        .map(|(_, c)| *c)
        .sum();
    for &id in order.iter().rev() {
        if total <= need {
            break;
        }
        if !mask[id] {
            continue;
        }
        if total - caps[id] < need {
            break;
        }
        mask[id] = false;
        total -= caps[id];
    }
}

/// Cost-benefit-ranking construction: open plants in ascending index order
/// until their capacity strictly exceeds total demand, then depots likewise.
pub fn cbr(inst: &Instance) -> Individual {
    let need = inst.total_demand();
    let mut ind = Individual::closed(inst.n_plants, inst.n_depots);
    open_greedy(
        &mut ind.plants,
        &inst.plant_capacity,
        &ranked(&plant_indices(inst)),
        need,
        Cover::Exceed,
    );
    let depot_rank = ranked(&depot_indices(inst, &ind.plants, DepotIndexPolicy::AllPlants));
    open_greedy(
        &mut ind.depots,
        &inst.depot_capacity,
        &depot_rank,
        need,
        Cover::Exceed,
    );
    ind
}

/// Repair and improve an arbitrary mask: greedily open until demand is
/// covered, then prune the worst removable openings, per facility stage.
pub fn mih(inst: &Instance, ind: &Individual) -> Individual {
    mih_with(inst, ind, DepotIndexPolicy::OpenPlants)
}

pub fn mih_with(inst: &Instance, ind: &Individual, policy: DepotIndexPolicy) -> Individual {
    let need = inst.total_demand();
    let mut out = ind.clone();

    let plant_rank = ranked(&plant_indices(inst));
    open_greedy(
        &mut out.plants,
        &inst.plant_capacity,
        &plant_rank,
        need,
        Cover::AtLeast,
    );
    prune_worst(&mut out.plants, &inst.plant_capacity, &plant_rank, need);

    // Depot indices see the corrected plant mask.
    let depot_rank = ranked(&depot_indices(inst, &out.plants, policy));
    open_greedy(
        &mut out.depots,
        &inst.depot_capacity,
        &depot_rank,
        need,
        Cover::AtLeast,
    );
    prune_worst(&mut out.depots, &inst.depot_capacity, &depot_rank, need);

    debug_assert!(out.is_feasible(inst));
    out
}

/// Round the LP relaxation's fractional openings at 0.5 and repair. The
/// relaxation's opening level of a facility is its capacity utilization, so
/// the threshold test `level >= 1/2` is the exact integer comparison
/// `2 * flow >= capacity`.
pub fn rounding_heuristic(inst: &Instance) -> Result<Individual> {
    let plan = lp_relaxation(inst)?;
    let plants = (0..inst.n_plants)
        .map(|i| {
            let outflow: Units = (0..inst.n_depots)
                .map(|j| *plan.plant_depot.get(i, j))
                .sum();
            2 * outflow >= inst.plant_capacity[i]
        })
        .collect();
    let depots = (0..inst.n_depots)
        .map(|j| {
            let throughput: Units = (0..inst.n_customers)
                .map(|k| *plan.depot_customer.get(j, k))
                .sum();
            2 * throughput >= inst.depot_capacity[j]
        })
        .collect();
    Ok(mih(inst, &Individual::new(plants, depots)))
}
