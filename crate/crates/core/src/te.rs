//! Demand generation and congestion-aware flow assignment.
//!
//! Flows are placed one by one on the cheapest residual-capacity path, then
//! revisited in deviation cycles that move a flow when doing so lowers the
//! network cost sum(load / (capacity - load)). Link loads are always the
//! canonical sum of accepted flow rates in ascending flow id order, so a
//! recomputation from the final assignment reproduces them bit for bit and
//! strict feasibility is exact, not approximate.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::path::HopPath;
use crate::topology::{LinkId, NodeId, Topology};

#[derive(Debug, Clone, PartialEq)]
pub struct Flow {
    pub id: u64,
    pub src: NodeId,
    pub dst: NodeId,
    pub rate: f64,
}

/// Demand model knobs; fractions of node count, pair count and capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandConfig {
    /// Fraction of nodes acting as traffic edges.
    pub pe_fraction: f64,
    /// Fraction of edge pairs that exchange traffic.
    pub active_pair_fraction: f64,
    /// Mean flow count per direction of an active pair.
    pub mean_flows: f64,
    /// Total rate as a fraction of the uniform link capacity.
    pub rate_fraction: f64,
    pub seed: u64,
}

impl Default for DemandConfig {
    fn default() -> Self {
        DemandConfig {
            pe_fraction: 0.40,
            active_pair_fraction: 0.20,
            mean_flows: 3.5,
            rate_fraction: 0.10,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DemandError {
    /// Fewer than two traffic edges.
    TooFewNodes { pe_count: usize },
    /// The pair fraction rounds to zero pairs.
    NoCouples,
    /// The rate budget is defined against one shared link capacity.
    NonuniformCapacity,
    BadConfig(&'static str),
}

impl fmt::Display for DemandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DemandError::TooFewNodes { pe_count } => {
                write!(f, "too few nodes for one couple ({pe_count} traffic edges)")
            }
            DemandError::NoCouples => write!(f, "too few nodes for one active couple"),
            DemandError::NonuniformCapacity => {
                write!(f, "demand generation needs a uniform link capacity")
            }
            DemandError::BadConfig(what) => write!(f, "bad demand config: {what}"),
        }
    }
}

/// Geometric draw on {1, 2, ...} by inversion.
fn geometric(rng: &mut ChaCha8Rng, p: f64) -> u64 {
    if p >= 1.0 {
        return 1;
    }
    let u: f64 = rng.gen();
    let k = libm::floor(libm::log(1.0 - u) / libm::log(1.0 - p)) + 1.0;
    if k < 1.0 {
        1
    } else if k > 1e6 {
        1_000_000
    } else {
        k as u64
    }
}

/// Unit exponential draw, rejecting the measure-zero zero.
fn exponential(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen();
        let e = -libm::log(1.0 - u);
        if e > 0.0 {
            return e;
        }
    }
}

/// Draws a reproducible demand set. Traffic edges are a random node subset;
/// a random subset of their pairs is active; each direction of an active
/// pair carries a geometric number of flows with exponential rates, rescaled
/// per direction so each direction's rates sum to exactly `rate_fraction`
/// times the link capacity.
pub fn generate_demands(t: &Topology, cfg: &DemandConfig) -> Result<Vec<Flow>, DemandError> {
    if !(cfg.pe_fraction > 0.0 && cfg.pe_fraction <= 1.0) {
        return Err(DemandError::BadConfig("pe_fraction outside (0, 1]"));
    }
    if !(cfg.active_pair_fraction > 0.0 && cfg.active_pair_fraction <= 1.0) {
        return Err(DemandError::BadConfig("active_pair_fraction outside (0, 1]"));
    }
    if !(cfg.mean_flows >= 1.0 && cfg.mean_flows.is_finite()) {
        return Err(DemandError::BadConfig("mean_flows below 1"));
    }
    if !(cfg.rate_fraction > 0.0 && cfg.rate_fraction.is_finite()) {
        return Err(DemandError::BadConfig("rate_fraction not positive"));
    }

    let capacity = t.links()[0].capacity;
    if t.links().iter().any(|l| l.capacity != capacity) {
        return Err(DemandError::NonuniformCapacity);
    }

    let n = t.node_count();
    let pe_count = libm::round(cfg.pe_fraction * n as f64) as usize;
    if pe_count < 2 {
        return Err(DemandError::TooFewNodes { pe_count });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut ids: Vec<u32> = (0..n as u32).collect();
    ids.shuffle(&mut rng);
    let mut pes: Vec<u32> = ids[..pe_count].to_vec();
    pes.sort_unstable();

    let mut couples: Vec<(u32, u32)> = Vec::new();
    for i in 0..pes.len() {
        for j in i + 1..pes.len() {
            couples.push((pes[i], pes[j]));
        }
    }
    let active_count =
        libm::round(cfg.active_pair_fraction * couples.len() as f64) as usize;
    if active_count == 0 {
        return Err(DemandError::NoCouples);
    }
    couples.shuffle(&mut rng);
    let mut active: Vec<(u32, u32)> = couples[..active_count].to_vec();
    active.sort_unstable();

    let p = 1.0 / cfg.mean_flows;
    let target = cfg.rate_fraction * capacity;
    let mut flows: Vec<Flow> = Vec::new();
    for &(a, b) in &active {
        for (src, dst) in [(NodeId(a), NodeId(b)), (NodeId(b), NodeId(a))] {
            let count = geometric(&mut rng, p);
            let raw: Vec<f64> = (0..count).map(|_| exponential(&mut rng)).collect();
            let sum: f64 = raw.iter().sum();
            let scale = target / sum;
            let mut rates: Vec<f64> = raw.iter().map(|r| r * scale).collect();
            // pin the left-to-right sum to the target exactly; one
            // correction of the last rate normally lands it, rounding can
            // ask for another
            let last = rates.len() - 1;
            for _ in 0..4 {
                let sum = rates.iter().fold(0.0, |acc, &r| acc + r);
                if sum == target {
                    break;
                }
                let adjusted = rates[last] + (target - sum);
                if !(adjusted > 0.0) {
                    break;
                }
                rates[last] = adjusted;
            }
            for rate in rates {
                flows.push(Flow {
                    id: flows.len() as u64,
                    src,
                    dst,
                    rate,
                });
            }
        }
    }
    Ok(flows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssignOptions {
    /// Deviation cycle budget after the initial placement.
    pub max_cycles: usize,
}

impl Default for AssignOptions {
    fn default() -> Self {
        AssignOptions { max_cycles: 50 }
    }
}

/// Improvement threshold: a cycle that lowers the network cost by no more
/// than this ends the deviation loop.
pub const PHI_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct AssignedFlow {
    pub id: u64,
    pub src: NodeId,
    pub dst: NodeId,
    pub rate: f64,
    pub path: HopPath,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    /// Ascending by flow id.
    pub accepted: Vec<AssignedFlow>,
    /// Ids of flows no feasible path could carry, ascending.
    pub rejected: Vec<u64>,
    /// Canonical per-link loads; always strictly below capacity.
    pub link_loads: Vec<f64>,
    /// Deviation cycles actually run.
    pub cycles: usize,
    /// Final network cost.
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssignError {
    DuplicateFlowId(u64),
    BadFlow { id: u64, reason: &'static str },
}

impl fmt::Display for AssignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignError::DuplicateFlowId(id) => write!(f, "duplicate flow id {id}"),
            AssignError::BadFlow { id, reason } => write!(f, "flow {id}: {reason}"),
        }
    }
}

/// Recomputes per-link loads of an assignment from scratch, in the
/// canonical order. Equals `Assignment::link_loads` bit for bit.
pub fn link_loads(t: &Topology, a: &Assignment) -> Vec<f64> {
    let mut loads = vec![0.0; t.link_count()];
    for f in &a.accepted {
        for l in f.path.link_ids(t).expect("assigned path fits the topology") {
            loads[l.index()] += f.rate;
        }
    }
    loads
}

/// Network cost sum(load / (capacity - load)).
pub fn network_cost(t: &Topology, loads: &[f64]) -> f64 {
    let mut phi = 0.0;
    for link in t.links() {
        let load = loads[link.id.index()];
        phi += load / (link.capacity - load);
    }
    phi
}

/// Total-order f64 wrapper for the metric heap.
#[derive(PartialEq, Clone, Copy, Debug)]
struct MetricCost(f64);

impl Eq for MetricCost {}

impl PartialOrd for MetricCost {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MetricCost {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Cheapest path under link weight 1 / (capacity - load - rate), links with
/// residual at or below the rate excluded. None when the endpoints fall
/// apart under that exclusion.
fn metric_dijkstra(
    t: &Topology,
    loads: &[f64],
    rate: f64,
    src: NodeId,
    dst: NodeId,
) -> Option<HopPath> {
    let n = t.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<LinkId>> = vec![None; n];
    let mut done = vec![false; n];
    dist[src.index()] = 0.0;
    let mut heap: BinaryHeap<Reverse<(MetricCost, u32)>> = BinaryHeap::new();
    heap.push(Reverse((MetricCost(0.0), src.0)));
    while let Some(Reverse((MetricCost(d), v))) = heap.pop() {
        let vi = v as usize;
        if done[vi] {
            continue;
        }
        done[vi] = true;
        if v == dst.0 {
            break;
        }
        for &l in t.out_links(NodeId(v)) {
            let link = t.link(l);
            let residual = link.capacity - loads[l.index()] - rate;
            if residual <= 0.0 {
                continue;
            }
            let nd = d + 1.0 / residual;
            if nd < dist[link.dst.index()] {
                dist[link.dst.index()] = nd;
                prev[link.dst.index()] = Some(l);
                heap.push(Reverse((MetricCost(nd), link.dst.0)));
            }
        }
    }
    if dist[dst.index()].is_infinite() {
        return None;
    }
    let mut rev = vec![dst];
    let mut v = dst;
    while v != src {
        let l = prev[v.index()].unwrap();
        v = t.link(l).src;
        rev.push(v);
    }
    rev.reverse();
    Some(HopPath::new(rev).expect("dijkstra paths are simple"))
}

/// Assignment working state. Loads are kept canonical at all times: every
/// mutation recomputes the touched links as the ascending-id sum of member
/// flow rates.
struct Placement<'a> {
    t: &'a Topology,
    flows: &'a [Flow],
    /// Per link: member flow indices, ascending by flow id.
    members: Vec<Vec<usize>>,
    loads: Vec<f64>,
    paths: Vec<Option<(HopPath, Vec<LinkId>)>>,
}

impl<'a> Placement<'a> {
    fn new(t: &'a Topology, flows: &'a [Flow]) -> Placement<'a> {
        Placement {
            t,
            flows,
            members: vec![Vec::new(); t.link_count()],
            loads: vec![0.0; t.link_count()],
            paths: vec![None; flows.len()],
        }
    }

    fn canonical_load(&self, l: LinkId) -> f64 {
        let mut acc = 0.0;
        for &i in &self.members[l.index()] {
            acc += self.flows[i].rate;
        }
        acc
    }

    /// Inserts the flow if every touched link stays strictly under capacity
    /// under the canonical sum; otherwise leaves the state untouched.
    fn try_insert(&mut self, i: usize, path: HopPath) -> bool {
        let links = path.link_ids(self.t).expect("candidate path fits");
        for &l in &links {
            let mut acc = 0.0;
            let mut placed = false;
            for &j in &self.members[l.index()] {
                if !placed && self.flows[j].id > self.flows[i].id {
                    acc += self.flows[i].rate;
                    placed = true;
                }
                acc += self.flows[j].rate;
            }
            if !placed {
                acc += self.flows[i].rate;
            }
            if !(acc < self.t.link(l).capacity) {
                return false;
            }
        }
        for &l in &links {
            let row = &mut self.members[l.index()];
            let pos = row
                .binary_search_by_key(&self.flows[i].id, |&j| self.flows[j].id)
                .unwrap_err();
            row.insert(pos, i);
            self.loads[l.index()] = self.canonical_load(l);
        }
        self.paths[i] = Some((path, links));
        true
    }

    fn remove(&mut self, i: usize) -> (HopPath, Vec<LinkId>) {
        let (path, links) = self.paths[i].take().expect("flow is placed");
        for &l in &links {
            let row = &mut self.members[l.index()];
            let pos = row
                .binary_search_by_key(&self.flows[i].id, |&j| self.flows[j].id)
                .unwrap();
            row.remove(pos);
            self.loads[l.index()] = self.canonical_load(l);
        }
        (path, links)
    }

    /// Network cost delta of adding `rate` onto `links` at current loads.
    fn phi_delta(&self, links: &[LinkId], rate: f64) -> f64 {
        let mut delta = 0.0;
        for &l in links {
            let cap = self.t.link(l).capacity;
            let load = self.loads[l.index()];
            delta += (load + rate) / (cap - load - rate) - load / (cap - load);
        }
        delta
    }
}

/// Places flows greedily in descending rate order, then runs deviation
/// cycles until a cycle changes nothing, improves the network cost by at
/// most [`PHI_EPSILON`], or the budget runs out.
pub fn assign_flows(
    t: &Topology,
    flows: &[Flow],
    opts: &AssignOptions,
) -> Result<Assignment, AssignError> {
    let mut seen: Vec<u64> = flows.iter().map(|f| f.id).collect();
    seen.sort_unstable();
    for w in seen.windows(2) {
        if w[0] == w[1] {
            return Err(AssignError::DuplicateFlowId(w[0]));
        }
    }
    for f in flows {
        if f.src.index() >= t.node_count() || f.dst.index() >= t.node_count() {
            return Err(AssignError::BadFlow {
                id: f.id,
                reason: "endpoint not in topology",
            });
        }
        if f.src == f.dst {
            return Err(AssignError::BadFlow {
                id: f.id,
                reason: "source equals destination",
            });
        }
        if !(f.rate > 0.0 && f.rate.is_finite()) {
            return Err(AssignError::BadFlow {
                id: f.id,
                reason: "rate not positive and finite",
            });
        }
    }

    let mut order: Vec<usize> = (0..flows.len()).collect();
    order.sort_by(|&a, &b| {
        flows[b]
            .rate
            .total_cmp(&flows[a].rate)
            .then(flows[a].id.cmp(&flows[b].id))
    });

    let mut place = Placement::new(t, flows);
    for &i in &order {
        let f = &flows[i];
        if let Some(path) = metric_dijkstra(t, &place.loads, f.rate, f.src, f.dst) {
            place.try_insert(i, path);
        }
    }

    let mut cycles = 0;
    for _ in 0..opts.max_cycles {
        let phi_before = network_cost(t, &place.loads);
        let mut changed = false;
        for &i in &order {
            if place.paths[i].is_none() {
                continue;
            }
            let f = &flows[i];
            let (old_path, old_links) = place.remove(i);
            let candidate = metric_dijkstra(t, &place.loads, f.rate, f.src, f.dst);
            let mut moved = false;
            if let Some(new_path) = candidate {
                if new_path != old_path {
                    let new_links = new_path.link_ids(t).expect("candidate path fits");
                    if place.phi_delta(&new_links, f.rate) < place.phi_delta(&old_links, f.rate)
                        && place.try_insert(i, new_path)
                    {
                        moved = true;
                        changed = true;
                    }
                }
            }
            if !moved {
                let ok = place.try_insert(i, old_path);
                debug_assert!(ok, "reinserting the old path cannot fail");
            }
        }
        cycles += 1;
        let phi_after = network_cost(t, &place.loads);
        if !changed || phi_before - phi_after <= PHI_EPSILON {
            break;
        }
    }

    let mut accepted: Vec<AssignedFlow> = Vec::new();
    let mut rejected: Vec<u64> = Vec::new();
    for (i, f) in flows.iter().enumerate() {
        match &place.paths[i] {
            Some((path, _)) => accepted.push(AssignedFlow {
                id: f.id,
                src: f.src,
                dst: f.dst,
                rate: f.rate,
                path: path.clone(),
            }),
            None => rejected.push(f.id),
        }
    }
    accepted.sort_by_key(|f| f.id);
    rejected.sort_unstable();

    // rebuild loads in the canonical order so the stored vector is exactly
    // what a recomputation from `accepted` yields
    let mut final_loads = vec![0.0; t.link_count()];
    for f in &accepted {
        for l in f.path.link_ids(t).expect("assigned path fits") {
            final_loads[l.index()] += f.rate;
        }
    }
    let phi = network_cost(t, &final_loads);
    Ok(Assignment {
        accepted,
        rejected,
        link_loads: final_loads,
        cycles,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::f7;
    use crate::topology::{EdgeSpec, NodeSpec};

    fn flow(id: u64, src: u32, dst: u32, rate: f64) -> Flow {
        Flow {
            id,
            src: NodeId(src),
            dst: NodeId(dst),
            rate,
        }
    }

    fn pair_topology(capacity: f64) -> Topology {
        Topology::from_undirected(
            ["a", "b"].iter().map(|n| NodeSpec::named(n)).collect(),
            vec![EdgeSpec {
                a: 0,
                b: 1,
                cost: 1,
                capacity,
            }],
        )
        .unwrap()
    }

    /// s and t joined by two 2-link routes, plus the m-t shortcut demand.
    fn square() -> Topology {
        let nodes = ["s", "m", "n", "t"].iter().map(|x| NodeSpec::named(x)).collect();
        let edges = [(0usize, 1usize), (1, 3), (0, 2), (2, 3)]
            .iter()
            .map(|&(a, b)| EdgeSpec {
                a,
                b,
                cost: 1,
                capacity: 200.0,
            })
            .collect();
        Topology::from_undirected(nodes, edges).unwrap()
    }

    #[test]
    fn admission_is_strict_on_capacity() {
        let t = pair_topology(10.0);
        let flows = [flow(0, 0, 1, 5.0), flow(1, 0, 1, 5.0)];
        let a = assign_flows(&t, &flows, &AssignOptions::default()).unwrap();
        // the second flow would fill the link exactly; residual must stay
        // positive, so it is turned away
        assert_eq!(a.accepted.len(), 1);
        assert_eq!(a.accepted[0].id, 0);
        assert_eq!(a.rejected, [1]);
        assert!(a.link_loads.iter().all(|&l| l < 10.0));
    }

    #[test]
    fn descending_rate_admission_order() {
        let t = pair_topology(10.0);
        // the large flow goes first and wins even with a higher id
        let flows = [flow(0, 0, 1, 2.0), flow(1, 0, 1, 7.0)];
        let a = assign_flows(&t, &flows, &AssignOptions::default()).unwrap();
        assert_eq!(a.accepted.len(), 2);
        let b = assign_flows(
            &t,
            &[flow(0, 0, 1, 6.0), flow(1, 0, 1, 7.0)],
            &AssignOptions::default(),
        )
        .unwrap();
        assert_eq!(b.accepted.len(), 1);
        assert_eq!(b.accepted[0].id, 1);
        assert_eq!(b.rejected, [0]);
    }

    #[test]
    fn parallel_routes_balance() {
        let t = square();
        let s = t.node_by_name("s").unwrap();
        let d = t.node_by_name("t").unwrap();
        let flows = [
            Flow { id: 0, src: s, dst: d, rate: 90.0 },
            Flow { id: 1, src: s, dst: d, rate: 80.0 },
        ];
        let a = assign_flows(&t, &flows, &AssignOptions::default()).unwrap();
        assert_eq!(a.accepted.len(), 2);
        // they must not share a route
        assert_ne!(a.accepted[0].path, a.accepted[1].path);
    }

    #[test]
    fn deviation_moves_an_early_flow_off_a_loaded_link() {
        let t = square();
        let id = |x: &str| t.node_by_name(x).unwrap();
        let flows = [
            Flow { id: 0, src: id("s"), dst: id("t"), rate: 60.0 },
            Flow { id: 1, src: id("m"), dst: id("t"), rate: 50.0 },
        ];
        let a = assign_flows(&t, &flows, &AssignOptions::default()).unwrap();
        assert_eq!(a.accepted.len(), 2);
        // the big flow picked s-m-t while the network was empty; the m-t
        // demand then loads that route and the deviation cycle moves it
        let f0 = &a.accepted[0];
        let names: Vec<&str> = f0
            .path
            .nodes()
            .iter()
            .map(|&v| t.node(v).name.as_str())
            .collect();
        assert_eq!(names, ["s", "n", "t"]);
        assert_eq!(a.cycles, 2);
    }

    #[test]
    fn loads_recompute_bitwise() {
        let t = f7();
        let flows = [
            flow(3, 0, 6, 2.5),
            flow(1, 6, 0, 1.25),
            flow(2, 1, 4, 0.7),
            flow(9, 4, 1, 3.3),
        ];
        let a = assign_flows(&t, &flows, &AssignOptions::default()).unwrap();
        assert_eq!(link_loads(&t, &a), a.link_loads);
        assert_eq!(a.phi, network_cost(&t, &a.link_loads));
        let ids: Vec<u64> = a.accepted.iter().map(|f| f.id).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        assert_eq!(ids, sorted);
    }

    #[test]
    fn bad_flows_rejected_up_front() {
        let t = pair_topology(10.0);
        let e = assign_flows(
            &t,
            &[flow(4, 0, 1, 1.0), flow(4, 1, 0, 1.0)],
            &AssignOptions::default(),
        )
        .unwrap_err();
        assert_eq!(e, AssignError::DuplicateFlowId(4));
        let e = assign_flows(&t, &[flow(0, 1, 1, 1.0)], &AssignOptions::default()).unwrap_err();
        assert!(matches!(e, AssignError::BadFlow { id: 0, .. }));
        let e = assign_flows(&t, &[flow(0, 0, 1, -2.0)], &AssignOptions::default()).unwrap_err();
        assert!(matches!(e, AssignError::BadFlow { id: 0, .. }));
    }

    #[test]
    fn demands_reproducible_by_seed() {
        let t = f7();
        let cfg = DemandConfig::default();
        let a = generate_demands(&t, &cfg).unwrap();
        let b = generate_demands(&t, &cfg).unwrap();
        assert_eq!(a, b);
        let c = generate_demands(
            &t,
            &DemandConfig {
                seed: 2,
                ..DemandConfig::default()
            },
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn demand_structure_on_f7() {
        let t = f7();
        let flows = generate_demands(&t, &DemandConfig::default()).unwrap();
        // 7 nodes: 3 traffic edges, 3 pairs, one active pair
        let mut pairs: Vec<(NodeId, NodeId)> = flows
            .iter()
            .map(|f| {
                if f.src < f.dst {
                    (f.src, f.dst)
                } else {
                    (f.dst, f.src)
                }
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        assert_eq!(pairs.len(), 1);
        // both directions present
        assert!(flows.iter().any(|f| f.src < f.dst));
        assert!(flows.iter().any(|f| f.src > f.dst));
        // ids are dense and ordered
        for (i, f) in flows.iter().enumerate() {
            assert_eq!(f.id, i as u64);
        }
    }

    #[test]
    fn rates_sum_to_the_budget_exactly_per_direction() {
        let t = f7();
        let cfg = DemandConfig::default();
        let flows = generate_demands(&t, &cfg).unwrap();
        let mut directions: Vec<(NodeId, NodeId)> =
            flows.iter().map(|f| (f.src, f.dst)).collect();
        directions.sort_unstable();
        directions.dedup();
        for (src, dst) in directions {
            let sum = flows
                .iter()
                .filter(|f| f.src == src && f.dst == dst)
                .fold(0.0, |acc, f| acc + f.rate);
            assert_eq!(sum, cfg.rate_fraction * 10.0);
        }
        assert!(flows.iter().all(|f| f.rate > 0.0));
    }

    #[test]
    fn nonuniform_capacity_refused() {
        let nodes = ["a", "b", "c"].iter().map(|n| NodeSpec::named(n)).collect();
        let edges = vec![
            EdgeSpec { a: 0, b: 1, cost: 1, capacity: 10.0 },
            EdgeSpec { a: 1, b: 2, cost: 1, capacity: 20.0 },
        ];
        let t = Topology::from_undirected(nodes, edges).unwrap();
        assert_eq!(
            generate_demands(&t, &DemandConfig::default()).unwrap_err(),
            DemandError::NonuniformCapacity
        );
    }

    #[test]
    fn tiny_fractions_error_out() {
        let t = f7();
        let cfg = DemandConfig {
            pe_fraction: 0.1,
            ..DemandConfig::default()
        };
        assert!(matches!(
            generate_demands(&t, &cfg).unwrap_err(),
            DemandError::TooFewNodes { .. }
        ));
    }
}
