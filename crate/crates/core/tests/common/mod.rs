//! Shared test oracles: brute-force enumeration of integral flows, full
//! open/close-mask enumeration, tiny random network generation, and rank
//! correlation. Everything here is independent of the solver paths it
//! checks.

#![allow(dead_code)]

use std::collections::HashMap;
use tscflp::flow::LayeredNetwork;
use tscflp::instance::{Individual, Instance};
use tscflp::matrix::Matrix;
use tscflp::rng::Sampler;

/// A small transportation network in plain nested-vec form.
#[derive(Debug, Clone)]
pub struct TinyNet {
    pub plant_caps: Vec<i64>,
    pub depot_caps: Vec<i64>,
    pub supply: Vec<Vec<i64>>,
    pub delivery: Vec<Vec<i64>>,
    pub demands: Vec<i64>,
}

impl TinyNet {
    pub fn layered(&self) -> LayeredNetwork<i64> {
        let p = self.plant_caps.len();
        let d = self.depot_caps.len();
        let k = self.demands.len();
        LayeredNetwork {
            n_plants_total: p,
            n_depots_total: d,
            n_customers: k,
            plant_ids: (0..p).collect(),
            depot_ids: (0..d).collect(),
            plant_caps: self.plant_caps.clone(),
            depot_caps: self.depot_caps.clone(),
            supply_costs: Matrix::from_fn(p, d, |i, j| self.supply[i][j]),
            delivery_costs: Matrix::from_fn(d, k, |j, c| self.delivery[j][c]),
            demands: self.demands.clone(),
        }
    }
}

/// Exhaustive minimum over all integral flow assignments: every way of
/// splitting each customer's demand across depots, times every way of
/// sourcing the resulting depot loads from plants. `None` when no feasible
/// assignment exists. Only viable for tiny networks with small demands.
pub fn brute_force_min_cost(net: &TinyNet) -> Option<i64> {
    let n_depots = net.depot_caps.len();
    let mut best: Option<i64> = None;
    let mut depot_loads = vec![0i64; n_depots];
    let mut second_stage_memo: HashMap<Vec<i64>, Option<i64>> = HashMap::new();

    fn assign_customers(
        net: &TinyNet,
        customer: usize,
        depot_loads: &mut Vec<i64>,
        delivery_cost: i64,
        best: &mut Option<i64>,
        memo: &mut HashMap<Vec<i64>, Option<i64>>,
    ) {
        if customer == net.demands.len() {
            let sourcing = *memo
                .entry(depot_loads.clone())
                .or_insert_with(|| cheapest_sourcing(net, depot_loads));
            if let Some(supply_cost) = sourcing {
                let total = delivery_cost + supply_cost;
                if best.map_or(true, |b| total < b) {
                    *best = Some(total);
                }
            }
            return;
        }
        split_demand(
            net,
            customer,
            0,
            net.demands[customer],
            depot_loads,
            delivery_cost,
            best,
            memo,
        );
    }

    #[allow(clippy::too_many_arguments)]
    fn split_demand(
        net: &TinyNet,
        customer: usize,
        depot: usize,
        remaining: i64,
        depot_loads: &mut Vec<i64>,
        delivery_cost: i64,
        best: &mut Option<i64>,
        memo: &mut HashMap<Vec<i64>, Option<i64>>,
    ) {
        let n_depots = net.depot_caps.len();
        if depot == n_depots - 1 {
            if depot_loads[depot] + remaining > net.depot_caps[depot] {
                return;
            }
            depot_loads[depot] += remaining;
            let cost = delivery_cost + remaining * net.delivery[depot][customer];
            assign_customers(net, customer + 1, depot_loads, cost, best, memo);
            depot_loads[depot] -= remaining;
            return;
        }
        let room = net.depot_caps[depot] - depot_loads[depot];
        for take in 0..=remaining.min(room) {
            depot_loads[depot] += take;
            split_demand(
                net,
                customer,
                depot + 1,
                remaining - take,
                depot_loads,
                delivery_cost + take * net.delivery[depot][customer],
                best,
                memo,
            );
            depot_loads[depot] -= take;
        }
    }

    /// Cheapest way to produce the given depot loads from the plants, by
    /// exhaustive composition over plants, or `None` if capacity is short.
    fn cheapest_sourcing(net: &TinyNet, depot_loads: &[i64]) -> Option<i64> {
        let n_plants = net.plant_caps.len();
        let mut remaining_cap = net.plant_caps.clone();
        let mut best: Option<i64> = None;

        fn source_depot(
            net: &TinyNet,
            depot: usize,
            plant: usize,
            need: i64,
            remaining_cap: &mut Vec<i64>,
            cost: i64,
            depot_loads: &[i64],
            best: &mut Option<i64>,
        ) {
            let n_plants = net.plant_caps.len();
            if plant == n_plants - 1 {
                if need > remaining_cap[plant] {
                    return;
                }
                remaining_cap[plant] -= need;
                let cost = cost + need * net.supply[plant][depot];
                next_depot(net, depot + 1, remaining_cap, cost, depot_loads, best);
                remaining_cap[plant] += need;
                return;
            }
            for take in 0..=need.min(remaining_cap[plant]) {
                remaining_cap[plant] -= take;
                source_depot(
                    net,
                    depot,
                    plant + 1,
                    need - take,
                    remaining_cap,
                    cost + take * net.supply[plant][depot],
                    depot_loads,
                    best,
                );
                remaining_cap[plant] += take;
            }
        }

        fn next_depot(
            net: &TinyNet,
            depot: usize,
            remaining_cap: &mut Vec<i64>,
            cost: i64,
            depot_loads: &[i64],
            best: &mut Option<i64>,
        ) {
            if depot == depot_loads.len() {
                if best.map_or(true, |b| cost < b) {
                    *best = Some(cost);
                }
                return;
            }
            source_depot(
                net,
                depot,
                0,
                depot_loads[depot],
                remaining_cap,
                cost,
                depot_loads,
                best,
            );
        }

        if n_plants == 0 {
            return if depot_loads.iter().all(|&t| t == 0) {
                Some(0)
            } else {
                None
            };
        }
        next_depot(net, 0, &mut remaining_cap, 0, depot_loads, &mut best);
        best
    }

    if n_depots == 0 {
        return if net.demands.iter().all(|&q| q == 0) {
            Some(0)
        } else {
            None
        };
    }
    assign_customers(
        net,
        0,
        &mut depot_loads,
        0,
        &mut best,
        &mut second_stage_memo,
    );
    best
}

/// Random network within the oracle's envelope: at most 2 plants, 3 depots,
/// 3 customers, demands at most 5. Capacities are drawn wide enough that
/// both feasible and infeasible networks occur.
pub fn random_tiny_net(s: &mut impl Sampler) -> TinyNet {
    let p = 1 + s.below(2);
    let d = 1 + s.below(3);
    let k = 1 + s.below(3);
    TinyNet {
        plant_caps: (0..p).map(|_| s.int_between(0, 12)).collect(),
        depot_caps: (0..d).map(|_| s.int_between(0, 12)).collect(),
        supply: (0..p)
            .map(|_| (0..d).map(|_| s.int_between(0, 9)).collect())
            .collect(),
        delivery: (0..d)
            .map(|_| (0..k).map(|_| s.int_between(0, 9)).collect())
            .collect(),
        demands: (0..k).map(|_| s.int_between(0, 5)).collect(),
    }
}

/// True optimum by exhaustive enumeration of all feasible open/close masks,
/// each evaluated exactly. Tractable up to a dozen or so facilities.
pub fn enumerate_optimum(inst: &Instance) -> Option<(Individual, i64)> {
    let bits = inst.n_plants + inst.n_depots;
    assert!(bits <= 20, "mask enumeration explodes beyond ~20 facilities");
    let mut best: Option<(Individual, i64)> = None;
    for mask in 0u64..(1 << bits) {
        let plants: Vec<bool> = (0..inst.n_plants).map(|i| mask >> i & 1 == 1).collect();
        let depots: Vec<bool> = (0..inst.n_depots)
            .map(|j| mask >> (inst.n_plants + j) & 1 == 1)
            .collect();
        let ind = Individual::new(plants, depots);
        if !ind.is_feasible(inst) {
            continue;
        }
        let z = tscflp::evaluator::evaluate_exact(inst, &ind)
            .expect("feasible mask evaluates")
            .objective;
        if best.as_ref().map_or(true, |(_, b)| z < *b) {
            best = Some((ind, z));
        }
    }
    best
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    pearson(&ra, &rb)
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}
