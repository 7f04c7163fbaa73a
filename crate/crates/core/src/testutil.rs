//! Shared test support: reference fixtures, random instances, naming
//! helpers. Compiled only with the `testutil` feature; not part of the
//! library proper.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::path::HopPath;
use crate::topology::{EdgeSpec, NodeSpec, Topology};

/// Seven-node reference network. A line n1..n7 of cost-1 links plus three
/// chords: n1-n3 (cost 1), n3-n5 (cost 2), n5-n7 (cost 3). Uniform capacity
/// 10. Small enough to reason about by hand, rich enough to exercise ECMP
/// ties, off-shortest direct links and biased-walk forks.
pub fn f7() -> Topology {
    let nodes = (1..=7)
        .map(|i| NodeSpec::named(&alloc::format!("n{i}")))
        .collect();
    let edges = [
        (0usize, 1usize, 1u32),
        (1, 2, 1),
        (2, 3, 1),
        (3, 4, 1),
        (4, 5, 1),
        (5, 6, 1),
        (0, 2, 1),
        (2, 4, 2),
        (4, 6, 3),
    ]
    .iter()
    .map(|&(a, b, cost)| EdgeSpec {
        a,
        b,
        cost,
        capacity: 10.0,
    })
    .collect();
    Topology::from_undirected(nodes, edges).unwrap()
}

/// A chain of `k` two-way splits, so end-to-end shortest path count is 2^k.
/// Node 0 is the start; the highest id is the far end.
pub fn diamond_chain(k: usize) -> Topology {
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    nodes.push(NodeSpec::named("d0"));
    let mut tail = 0usize;
    for i in 0..k {
        let up = nodes.len();
        nodes.push(NodeSpec::named(&alloc::format!("u{i}")));
        let down = nodes.len();
        nodes.push(NodeSpec::named(&alloc::format!("v{i}")));
        let next = nodes.len();
        nodes.push(NodeSpec::named(&alloc::format!("d{}", i + 1)));
        for mid in [up, down] {
            edges.push(EdgeSpec {
                a: tail,
                b: mid,
                cost: 1,
                capacity: 10.0,
            });
            edges.push(EdgeSpec {
                a: mid,
                b: next,
                cost: 1,
                capacity: 10.0,
            });
        }
        tail = next;
    }
    Topology::from_undirected(nodes, edges).unwrap()
}

/// Path from node names; panics on unknown names or broken adjacency.
pub fn names_to_path(t: &Topology, names: &[&str]) -> HopPath {
    let nodes = names
        .iter()
        .map(|n| t.node_by_name(n).expect("known node name"))
        .collect();
    let p = HopPath::new(nodes).expect("simple path");
    p.validate_on(t).expect("adjacent hops");
    p
}

pub fn path_names(t: &Topology, p: &HopPath) -> Vec<String> {
    p.nodes()
        .iter()
        .map(|&n| t.node(n).name.clone())
        .collect()
}

/// Random connected topology: a random spanning tree plus `extra` chords,
/// uniform capacity, costs uniform in 1..=max_cost.
pub fn random_topology<R: Rng>(
    rng: &mut R,
    n: usize,
    extra: usize,
    max_cost: u32,
    capacity: f64,
) -> Topology {
    assert!(n >= 2);
    let nodes = (0..n)
        .map(|i| NodeSpec::named(&alloc::format!("r{i}")))
        .collect();
    let mut present: Vec<(usize, usize)> = Vec::new();
    let mut edges: Vec<EdgeSpec> = Vec::new();
    let add = |rng: &mut R, a: usize, b: usize, edges: &mut Vec<EdgeSpec>| {
        edges.push(EdgeSpec {
            a,
            b,
            cost: rng.gen_range(1..=max_cost),
            capacity,
        });
    };
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        present.push((parent.min(i), parent.max(i)));
        add(rng, parent, i, &mut edges);
    }
    let mut free: Vec<(usize, usize)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if !present.contains(&(a, b)) {
                free.push((a, b));
            }
        }
    }
    for _ in 0..extra.min(free.len()) {
        let pick = rng.gen_range(0..free.len());
        let (a, b) = free.swap_remove(pick);
        add(rng, a, b, &mut edges);
    }
    Topology::from_undirected(nodes, edges).unwrap()
}

/// Random simple path of 1..=max_links links: a self-avoiding walk from a
/// random start, stopping early when boxed in.
pub fn random_simple_path<R: Rng>(rng: &mut R, t: &Topology, max_links: usize) -> HopPath {
    loop {
        let start = crate::topology::NodeId(rng.gen_range(0..t.node_count() as u32));
        let mut nodes = alloc::vec![start];
        let target = rng.gen_range(1..=max_links);
        while nodes.len() <= target {
            let v = *nodes.last().unwrap();
            let choices: Vec<crate::topology::NodeId> = t
                .out_links(v)
                .iter()
                .map(|&l| t.link(l).dst)
                .filter(|d| !nodes.contains(d))
                .collect();
            if choices.is_empty() {
                break;
            }
            nodes.push(choices[rng.gen_range(0..choices.len())]);
        }
        if nodes.len() >= 2 {
            return HopPath::new(nodes).expect("walk is self-avoiding");
        }
    }
}
