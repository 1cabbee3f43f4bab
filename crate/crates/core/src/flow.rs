//! Exact min-cost flow on the layered source -> plants -> depots ->
//! customers -> sink network.
//!
//! This is the computational kernel behind both exact fitness evaluation
//! (`C = i64`) and the LP-relaxation lower bound (`C = BigRational`, fixed
//! costs folded into unit costs). Capacities, demands and therefore flows
//! are always integral; only arc costs are generic. Depot throughput limits
//! are modelled by splitting each depot into an in/out node pair joined by
//! an arc of capacity `p_j`.
//!
//! Algorithm: successive shortest paths with node potentials, Bellman-Ford
//! for the initial potentials and Dijkstra on reduced costs afterwards.
//! With exact scalar types every comparison is exact, so the returned flow
//! is a true optimum, never an approximation.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::CostScalar;
use crate::Units;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

/// Transportation network restricted to a set of open facilities. Index
/// vectors map the compact open-facility axes back to original ids so flow
/// plans can be reported in full instance coordinates.
#[derive(Debug, Clone)]
pub struct LayeredNetwork<C> {
    pub n_plants_total: usize,
    pub n_depots_total: usize,
    pub n_customers: usize,
    /// Original id of each open plant.
    pub plant_ids: Vec<usize>,
    /// Original id of each open depot.
    pub depot_ids: Vec<usize>,
    /// Capacity per open plant.
    pub plant_caps: Vec<Units>,
    /// Throughput capacity per open depot.
    pub depot_caps: Vec<Units>,
    /// Unit cost open plant -> open depot.
    pub supply_costs: Matrix<C>,
    /// Unit cost open depot -> customer.
    pub delivery_costs: Matrix<C>,
    pub demands: Vec<Units>,
}

impl<C: CostScalar> LayeredNetwork<C> {
    pub fn total_demand(&self) -> Units {
        self.demands.iter().sum()
    }

    fn check_shape(&self) -> Result<()> {
        let p = self.plant_ids.len();
        let d = self.depot_ids.len();
        let shape_ok = self.plant_caps.len() == p
            && self.depot_caps.len() == d
            && self.supply_costs.rows() == p
            && self.supply_costs.cols() == d
            && self.delivery_costs.rows() == d
            && self.delivery_costs.cols() == self.n_customers
            && self.demands.len() == self.n_customers;
        if !shape_ok {
            return Err(Error::Validation("layered network shape mismatch".into()));
        }
        let nonneg = self.plant_caps.iter().all(|&v| v >= 0)
            && self.depot_caps.iter().all(|&v| v >= 0)
            && self.demands.iter().all(|&v| v >= 0)
            && self.supply_costs.iter().all(|c| !c.is_negative())
            && self.delivery_costs.iter().all(|c| !c.is_negative());
        if !nonneg {
            return Err(Error::Validation(
                "capacities, costs and demands must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Flows realizing one evaluation, reported in full instance coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPlan<C> {
    /// `x`: units shipped plant -> depot.
    pub plant_depot: Matrix<Units>,
    /// `s`: units shipped depot -> customer.
    pub depot_customer: Matrix<Units>,
    /// Total transport cost of the flows.
    pub cost: C,
}

impl<C: CostScalar> FlowPlan<C> {
    pub fn total_first_stage(&self) -> Units {
        self.plant_depot.iter().sum()
    }

    pub fn total_second_stage(&self) -> Units {
        self.depot_customer.iter().sum()
    }

    /// Transport cost recomputed from the flows and the network's unit
    /// costs. Exact scalars make this an exact identity with `self.cost`.
    pub fn cost_recomputed(&self, net: &LayeredNetwork<C>) -> C {
        let mut total = C::zero();
        for (pi, &plant) in net.plant_ids.iter().enumerate() {
            for (di, &depot) in net.depot_ids.iter().enumerate() {
                let units = *self.plant_depot.get(plant, depot);
                if units != 0 {
                    total = total + net.supply_costs.get(pi, di).clone() * C::from_units(units);
                }
            }
        }
        for (di, &depot) in net.depot_ids.iter().enumerate() {
            for k in 0..net.n_customers {
                let units = *self.depot_customer.get(depot, k);
                if units != 0 {
                    total = total + net.delivery_costs.get(di, k).clone() * C::from_units(units);
                }
            }
        }
        total
    }

    /// Check every flow-plan invariant against the network it was solved on.
    pub fn verify(&self, net: &LayeredNetwork<C>) -> Result<()> {
        for k in 0..net.n_customers {
            let inflow: Units = net
                .depot_ids
                .iter()
                .map(|&depot| *self.depot_customer.get(depot, k))
                .sum();
            if inflow != net.demands[k] {
                return Err(Error::Validation(format!(
                    "customer {k} receives {inflow}, demand is {}",
                    net.demands[k]
                )));
            }
        }
        for (di, &depot) in net.depot_ids.iter().enumerate() {
            let inflow: Units = net
                .plant_ids
                .iter()
                .map(|&plant| *self.plant_depot.get(plant, depot))
                .sum();
            let outflow: Units = (0..net.n_customers)
                .map(|k| *self.depot_customer.get(depot, k))
                .sum();
            if inflow != outflow {
                return Err(Error::Validation(format!(
                    "depot {depot} violates conservation: in {inflow}, out {outflow}"
                )));
            }
            if outflow > net.depot_caps[di] {
                return Err(Error::Validation(format!(
                    "depot {depot} throughput {outflow} exceeds capacity {}",
                    net.depot_caps[di]
                )));
            }
        }
        for (pi, &plant) in net.plant_ids.iter().enumerate() {
            let outflow: Units = net
                .depot_ids
                .iter()
                .map(|&depot| *self.plant_depot.get(plant, depot))
                .sum();
            if outflow > net.plant_caps[pi] {
                return Err(Error::Validation(format!(
                    "plant {plant} outflow {outflow} exceeds capacity {}",
                    net.plant_caps[pi]
                )));
            }
        }
        if self.cost_recomputed(net) != self.cost {
            return Err(Error::Validation("flow cost does not recompute".into()));
        }
        Ok(())
    }
}

struct Edge<C> {
    to: u32,
    residual: Units,
    cost: C,
}

struct Graph<C> {
    edges: Vec<Edge<C>>,
    adj: Vec<Vec<u32>>,
}

impl<C: CostScalar> Graph<C> {
    fn new(n_nodes: usize) -> Self {
        Self {
            edges: Vec::new(),
            adj: vec![Vec::new(); n_nodes],
        }
    }

    /// Adds the forward arc and its zero-capacity twin; twin id is `id ^ 1`.
    fn add(&mut self, from: usize, to: usize, cap: Units, cost: C) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge {
            to: to as u32,
            residual: cap,
            cost: cost.clone(),
        });
        self.edges.push(Edge {
            to: from as u32,
            residual: 0,
            cost: -cost,
        });
        self.adj[from].push(id as u32);
        self.adj[to].push(id as u32 + 1);
        id
    }

    fn flow_on(&self, id: usize) -> Units {
        self.edges[id ^ 1].residual
    }
}

/// Minimum-cost feasible flow meeting every demand exactly, or an explicit
/// infeasibility error when the open capacity cannot carry the demand.
pub fn min_cost_flow<C: CostScalar>(net: &LayeredNetwork<C>) -> Result<FlowPlan<C>> {
    net.check_shape()?;
    let n_open_plants = net.plant_ids.len();
    let n_open_depots = net.depot_ids.len();
    let n_customers = net.n_customers;
    let required = net.total_demand();

    let empty_plan = || FlowPlan {
        plant_depot: Matrix::filled(net.n_plants_total, net.n_depots_total, 0),
        depot_customer: Matrix::filled(net.n_depots_total, n_customers, 0),
        cost: C::zero(),
    };
    if required == 0 {
        return Ok(empty_plan());
    }

    // Node layout: source, plants, depot-in, depot-out, customers, sink.
    let source = 0usize;
    let plant_node = |i: usize| 1 + i;
    let depot_in = |j: usize| 1 + n_open_plants + j;
    let depot_out = |j: usize| 1 + n_open_plants + n_open_depots + j;
    let customer_node = |k: usize| 1 + n_open_plants + 2 * n_open_depots + k;
    let sink = 1 + n_open_plants + 2 * n_open_depots + n_customers;
    let n_nodes = sink + 1;

    let mut graph = Graph::new(n_nodes);
    for (i, &cap) in net.plant_caps.iter().enumerate() {
        graph.add(source, plant_node(i), cap, C::zero());
    }
    let mut supply_edges = Matrix::filled(n_open_plants, n_open_depots, usize::MAX);
    for i in 0..n_open_plants {
        for j in 0..n_open_depots {
            let id = graph.add(
                plant_node(i),
                depot_in(j),
                net.plant_caps[i],
                net.supply_costs.get(i, j).clone(),
            );
            *supply_edges.get_mut(i, j) = id;
        }
    }
    for (j, &cap) in net.depot_caps.iter().enumerate() {
        graph.add(depot_in(j), depot_out(j), cap, C::zero());
    }
    let mut delivery_edges = Matrix::filled(n_open_depots, n_customers, usize::MAX);
    for j in 0..n_open_depots {
        for k in 0..n_customers {
            let id = graph.add(
                depot_out(j),
                customer_node(k),
                net.demands[k],
                net.delivery_costs.get(j, k).clone(),
            );
            *delivery_edges.get_mut(j, k) = id;
        }
    }
    for (k, &q) in net.demands.iter().enumerate() {
        graph.add(customer_node(k), sink, q, C::zero());
    }

    // Initial potentials by Bellman-Ford (SPFA). All our arc costs are
    // non-negative, but this keeps the kernel correct for any sign.
    let mut potential: Vec<Option<C>> = vec![None; n_nodes];
    potential[source] = Some(C::zero());
    {
        let mut queue = VecDeque::from([source as u32]);
        let mut queued = vec![false; n_nodes];
        queued[source] = true;
        while let Some(u) = queue.pop_front() {
            let u = u as usize;
            queued[u] = false;
            let dist_u = potential[u].clone().expect("queued nodes have potential");
            for &eid in &graph.adj[u] {
                let edge = &graph.edges[eid as usize];
                if edge.residual == 0 {
                    continue;
                }
                let candidate = dist_u.clone() + edge.cost.clone();
                let v = edge.to as usize;
                let better = match &potential[v] {
                    None => true,
                    Some(cur) => candidate < *cur,
                };
                if better {
                    potential[v] = Some(candidate);
                    if !queued[v] {
                        queued[v] = true;
                        queue.push_back(v as u32);
                    }
                }
            }
        }
    }

    let mut dist: Vec<Option<C>> = vec![None; n_nodes];
    let mut parent: Vec<u32> = vec![u32::MAX; n_nodes];
    let mut pushed: Units = 0;
    while pushed < required {
        dist.iter_mut().for_each(|d| *d = None);
        parent.iter_mut().for_each(|p| *p = u32::MAX);
        dist[source] = Some(C::zero());
        let mut heap: BinaryHeap<Reverse<(C, u32)>> = BinaryHeap::new();
        heap.push(Reverse((C::zero(), source as u32)));
        while let Some(Reverse((d, u))) = heap.pop() {
            let u = u as usize;
            match &dist[u] {
                Some(cur) if *cur < d => continue,
                None => continue,
                _ => {}
            }
            let phi_u = potential[u].clone().expect("reached nodes have potential");
            for &eid in &graph.adj[u] {
                let edge = &graph.edges[eid as usize];
                if edge.residual == 0 {
                    continue;
                }
                let v = edge.to as usize;
                let phi_v = match &potential[v] {
                    Some(p) => p.clone(),
                    // Unreachable in the initial network stays unreachable.
                    None => continue,
                };
                let reduced = edge.cost.clone() + phi_u.clone() - phi_v;
                debug_assert!(!reduced.is_negative(), "reduced cost must be non-negative");
                let candidate = d.clone() + reduced;
                let better = match &dist[v] {
                    None => true,
                    Some(cur) => candidate < *cur,
                };
                if better {
                    dist[v] = Some(candidate.clone());
                    parent[v] = eid;
                    heap.push(Reverse((candidate, v as u32)));
                }
            }
        }
        if dist[sink].is_none() {
            return Err(Error::FlowInfeasible {
                delivered: pushed,
                required,
            });
        }

        let mut bottleneck = required - pushed;
        let mut node = sink;
        while node != source {
            let eid = parent[node] as usize;
            bottleneck = bottleneck.min(graph.edges[eid].residual);
            node = graph.edges[eid ^ 1].to as usize;
        }
        let mut node = sink;
        while node != source {
            let eid = parent[node] as usize;
            graph.edges[eid].residual -= bottleneck;
            graph.edges[eid ^ 1].residual += bottleneck;
            node = graph.edges[eid ^ 1].to as usize;
        }
        pushed += bottleneck;

        for v in 0..n_nodes {
            if let Some(d) = &dist[v] {
                let phi = potential[v].clone().expect("reached implies potential");
                potential[v] = Some(phi + d.clone());
            }
        }
    }

    let mut plan = empty_plan();
    let mut cost = C::zero();
    for (i, &plant) in net.plant_ids.iter().enumerate() {
        for (j, &depot) in net.depot_ids.iter().enumerate() {
            let units = graph.flow_on(*supply_edges.get(i, j));
            if units != 0 {
                *plan.plant_depot.get_mut(plant, depot) = units;
                cost = cost + net.supply_costs.get(i, j).clone() * C::from_units(units);
            }
        }
    }
    for (j, &depot) in net.depot_ids.iter().enumerate() {
        for k in 0..n_customers {
            let units = graph.flow_on(*delivery_edges.get(j, k));
            if units != 0 {
                *plan.depot_customer.get_mut(depot, k) = units;
                cost = cost + net.delivery_costs.get(j, k).clone() * C::from_units(units);
            }
        }
    }
    plan.cost = cost;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_route() -> LayeredNetwork<i64> {
        LayeredNetwork {
            n_plants_total: 1,
            n_depots_total: 1,
            n_customers: 1,
            plant_ids: vec![0],
            depot_ids: vec![0],
            plant_caps: vec![100],
            depot_caps: vec![100],
            supply_costs: Matrix::from_vec(1, 1, vec![2]),
            delivery_costs: Matrix::from_vec(1, 1, vec![3]),
            demands: vec![20],
        }
    }

    #[test]
    fn single_route_costs_sum_of_both_legs() {
        let plan = min_cost_flow(&single_route()).unwrap();
        assert_eq!(*plan.plant_depot.get(0, 0), 20);
        assert_eq!(*plan.depot_customer.get(0, 0), 20);
        assert_eq!(plan.cost, 100);
        plan.verify(&single_route()).unwrap();
    }

    #[test]
    fn zero_customers_gives_empty_plan() {
        let net = LayeredNetwork::<i64> {
            n_plants_total: 1,
            n_depots_total: 1,
            n_customers: 0,
            plant_ids: vec![0],
            depot_ids: vec![0],
            plant_caps: vec![10],
            depot_caps: vec![10],
            supply_costs: Matrix::from_vec(1, 1, vec![4]),
            delivery_costs: Matrix::from_vec(1, 0, vec![]),
            demands: vec![],
        };
        let plan = min_cost_flow(&net).unwrap();
        assert_eq!(plan.cost, 0);
        assert_eq!(plan.total_first_stage(), 0);
    }

    #[test]
    fn insufficient_capacity_is_an_explicit_error() {
        let mut net = single_route();
        net.plant_caps = vec![5];
        match min_cost_flow(&net) {
            Err(Error::FlowInfeasible {
                delivered,
                required,
            }) => {
                assert_eq!(delivered, 5);
                assert_eq!(required, 20);
            }
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn prefers_cheap_plant_until_it_saturates() {
        // Plant 0 is cheap but small; the remainder must come from plant 1.
        let net = LayeredNetwork::<i64> {
            n_plants_total: 2,
            n_depots_total: 1,
            n_customers: 1,
            plant_ids: vec![0, 1],
            depot_ids: vec![0],
            plant_caps: vec![6, 50],
            depot_caps: vec![50],
            supply_costs: Matrix::from_vec(2, 1, vec![1, 4]),
            delivery_costs: Matrix::from_vec(1, 1, vec![2]),
            demands: vec![10],
        };
        let plan = min_cost_flow(&net).unwrap();
        assert_eq!(*plan.plant_depot.get(0, 0), 6);
        assert_eq!(*plan.plant_depot.get(1, 0), 4);
        assert_eq!(plan.cost, 6 + 16 + 20);
    }

    #[test]
    fn depot_split_respects_throughput_caps() {
        // One depot is cheap but capped below the demand.
        let net = LayeredNetwork::<i64> {
            n_plants_total: 1,
            n_depots_total: 2,
            n_customers: 1,
            plant_ids: vec![0],
            depot_ids: vec![0, 1],
            plant_caps: vec![100],
            depot_caps: vec![7, 100],
            supply_costs: Matrix::from_vec(1, 2, vec![1, 1]),
            delivery_costs: Matrix::from_vec(2, 1, vec![1, 5]),
            demands: vec![12],
        };
        let plan = min_cost_flow(&net).unwrap();
        assert_eq!(*plan.depot_customer.get(0, 0), 7);
        assert_eq!(*plan.depot_customer.get(1, 0), 5);
        plan.verify(&net).unwrap();
    }

    #[test]
    fn rational_costs_solve_exactly() {
        use num_rational::BigRational;
        let half = BigRational::new(1.into(), 2.into());
        let third = BigRational::new(1.into(), 3.into());
        let net = LayeredNetwork::<BigRational> {
            n_plants_total: 1,
            n_depots_total: 1,
            n_customers: 1,
            plant_ids: vec![0],
            depot_ids: vec![0],
            plant_caps: vec![30],
            depot_caps: vec![30],
            supply_costs: Matrix::from_vec(1, 1, vec![half]),
            delivery_costs: Matrix::from_vec(1, 1, vec![third]),
            demands: vec![12],
        };
        let plan = min_cost_flow(&net).unwrap();
        // 12 * (1/2 + 1/3) = 10 exactly.
        assert_eq!(plan.cost, BigRational::from_integer(10.into()));
    }
}
