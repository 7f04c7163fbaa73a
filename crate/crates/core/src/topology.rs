//! Network topology model.
//!
//! Routers are named nodes with an IPv4 loopback; links are unidirectional
//! with an IGP cost and a capacity. The builders expand undirected edge lists
//! into link pairs. Node and link ids are dense indices, usable directly as
//! array offsets by the routing and flow assignment code.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Dense node index, meaningful only for the topology that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense link index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u32);

impl LinkId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// IPv4 loopback address stored as a host-order u32.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loopback(pub u32);

/// First auto-assigned loopback, 10.0.0.1. Node i gets base + 2*i so the
/// device part stays odd, which the IPv6 SID plane relies on.
pub const DEFAULT_LOOPBACK_BASE: Loopback = Loopback(0x0a00_0001);

impl Loopback {
    pub fn from_octets(o: [u8; 4]) -> Loopback {
        Loopback(u32::from_be_bytes(o))
    }

    /// Low `bits` bits of the address, the per-device index for SID numbering.
    pub fn low_bits(self, bits: u32) -> u32 {
        if bits >= 32 {
            self.0
        } else {
            self.0 & ((1u32 << bits) - 1)
        }
    }
}

impl fmt::Display for Loopback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0.to_be_bytes();
        write!(f, "{a}.{b}.{c}.{d}")
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub loopback: Loopback,
}

#[derive(Debug, Clone)]
pub struct Link {
    pub id: LinkId,
    pub src: NodeId,
    pub dst: NodeId,
    pub cost: u32,
    pub capacity: f64,
}

/// Node description handed to the builders. A missing loopback is filled in
/// from [`DEFAULT_LOOPBACK_BASE`] by node position.
#[derive(Debug, Clone)]
pub struct NodeSpec {
    pub name: String,
    pub loopback: Option<Loopback>,
}

impl NodeSpec {
    pub fn named(name: &str) -> NodeSpec {
        NodeSpec {
            name: String::from(name),
            loopback: None,
        }
    }
}

/// One unidirectional link, endpoints given as indices into the node list.
#[derive(Debug, Clone, Copy)]
pub struct LinkSpec {
    pub src: usize,
    pub dst: usize,
    pub cost: u32,
    pub capacity: f64,
}

/// One undirected edge; the builder expands it into a link pair sharing cost
/// and capacity.
#[derive(Debug, Clone, Copy)]
pub struct EdgeSpec {
    pub a: usize,
    pub b: usize,
    pub cost: u32,
    pub capacity: f64,
}

/// A single finding from [`Topology::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    /// Fewer than two nodes.
    Trivial,
    /// Some node pair has no route between them.
    Disconnected,
    DuplicateName(String),
    /// Two nodes share one loopback address.
    DuplicateLoopback(String, String),
    SelfLoop(String),
    DuplicateLink(String, String),
    NonpositiveCost(String, String),
    BadCapacity(String, String),
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Trivial => write!(f, "disconnected or trivial"),
            Diagnostic::Disconnected => write!(f, "disconnected"),
            Diagnostic::DuplicateName(n) => write!(f, "duplicate node name {n}"),
            Diagnostic::DuplicateLoopback(a, b) => {
                write!(f, "nodes {a} and {b} share a loopback address")
            }
            Diagnostic::SelfLoop(n) => write!(f, "self loop at {n}"),
            Diagnostic::DuplicateLink(a, b) => write!(f, "duplicate link {a} -> {b}"),
            Diagnostic::NonpositiveCost(a, b) => write!(f, "nonpositive cost on {a} -> {b}"),
            Diagnostic::BadCapacity(a, b) => write!(f, "nonpositive capacity on {a} -> {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyError {
    DuplicateNodeName(String),
    /// A link spec referenced a node index outside the node list.
    BadNodeIndex(usize),
    /// Construction succeeded but validation found problems.
    Invalid(Vec<Diagnostic>),
}

impl fmt::Display for TopologyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyError::DuplicateNodeName(n) => write!(f, "duplicate node name {n}"),
            TopologyError::BadNodeIndex(i) => write!(f, "link references node index {i}"),
            TopologyError::Invalid(diags) => {
                write!(f, "invalid topology:")?;
                for d in diags {
                    write!(f, " {d};")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Topology {
    nodes: Vec<Node>,
    links: Vec<Link>,
    /// Outgoing links per node, sorted by destination id.
    out: Vec<Vec<LinkId>>,
    by_name: BTreeMap<String, NodeId>,
}

impl Topology {
    /// Builds from explicit unidirectional links and rejects anything that
    /// fails [`Topology::validate`].
    pub fn from_parts(
        nodes: Vec<NodeSpec>,
        links: Vec<LinkSpec>,
    ) -> Result<Topology, TopologyError> {
        let mut by_name = BTreeMap::new();
        let mut built_nodes = Vec::with_capacity(nodes.len());
        for (i, spec) in nodes.into_iter().enumerate() {
            let id = NodeId(i as u32);
            if by_name.insert(spec.name.clone(), id).is_some() {
                return Err(TopologyError::DuplicateNodeName(spec.name));
            }
            let loopback = spec
                .loopback
                .unwrap_or(Loopback(DEFAULT_LOOPBACK_BASE.0 + 2 * i as u32));
            built_nodes.push(Node {
                id,
                name: spec.name,
                loopback,
            });
        }

        let n = built_nodes.len();
        let mut built_links = Vec::with_capacity(links.len());
        for (i, spec) in links.into_iter().enumerate() {
            if spec.src >= n {
                return Err(TopologyError::BadNodeIndex(spec.src));
            }
            if spec.dst >= n {
                return Err(TopologyError::BadNodeIndex(spec.dst));
            }
            built_links.push(Link {
                id: LinkId(i as u32),
                src: NodeId(spec.src as u32),
                dst: NodeId(spec.dst as u32),
                cost: spec.cost,
                capacity: spec.capacity,
            });
        }

        let mut out: Vec<Vec<LinkId>> = (0..n).map(|_| Vec::new()).collect();
        for link in &built_links {
            out[link.src.index()].push(link.id);
        }
        for links in &mut out {
            links.sort_by_key(|&l| built_links[l.index()].dst);
        }

        let topo = Topology {
            nodes: built_nodes,
            links: built_links,
            out,
            by_name,
        };
        let diags = topo.validate();
        if diags.is_empty() {
            Ok(topo)
        } else {
            Err(TopologyError::Invalid(diags))
        }
    }

    /// Builds from an undirected edge list; each edge becomes two links.
    pub fn from_undirected(
        nodes: Vec<NodeSpec>,
        edges: Vec<EdgeSpec>,
    ) -> Result<Topology, TopologyError> {
        let mut links = Vec::with_capacity(edges.len() * 2);
        for e in edges {
            links.push(LinkSpec {
                src: e.a,
                dst: e.b,
                cost: e.cost,
                capacity: e.capacity,
            });
            links.push(LinkSpec {
                src: e.b,
                dst: e.a,
                cost: e.cost,
                capacity: e.capacity,
            });
        }
        Topology::from_parts(nodes, links)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    #[inline]
    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    #[inline]
    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.index()]
    }

    /// Outgoing links of `n`, sorted by destination id.
    #[inline]
    pub fn out_links(&self, n: NodeId) -> &[LinkId] {
        &self.out[n.index()]
    }

    /// The unique link a -> b, if the nodes are adjacent in that direction.
    pub fn link_between(&self, a: NodeId, b: NodeId) -> Option<LinkId> {
        let out = &self.out[a.index()];
        out.binary_search_by(|&l| self.links[l.index()].dst.cmp(&b))
            .ok()
            .map(|i| out[i])
    }

    pub fn node_by_name(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    /// Full structural check. Builders call this and refuse to hand out a
    /// topology with findings; it stays public so loaders can report all
    /// problems at once.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        let n = self.nodes.len();

        if n < 2 {
            diags.push(Diagnostic::Trivial);
        }

        let mut by_loopback: BTreeMap<Loopback, NodeId> = BTreeMap::new();
        for node in &self.nodes {
            if let Some(prev) = by_loopback.insert(node.loopback, node.id) {
                diags.push(Diagnostic::DuplicateLoopback(
                    self.nodes[prev.index()].name.clone(),
                    node.name.clone(),
                ));
            }
        }

        let mut seen_pairs: BTreeMap<(NodeId, NodeId), LinkId> = BTreeMap::new();
        for link in &self.links {
            let src = &self.nodes[link.src.index()].name;
            let dst = &self.nodes[link.dst.index()].name;
            if link.src == link.dst {
                diags.push(Diagnostic::SelfLoop(src.clone()));
                continue;
            }
            if seen_pairs.insert((link.src, link.dst), link.id).is_some() {
                diags.push(Diagnostic::DuplicateLink(src.clone(), dst.clone()));
            }
            if link.cost == 0 {
                diags.push(Diagnostic::NonpositiveCost(src.clone(), dst.clone()));
            }
            if !(link.capacity > 0.0) || !link.capacity.is_finite() {
                diags.push(Diagnostic::BadCapacity(src.clone(), dst.clone()));
            }
        }

        if n >= 2 && (!self.reachable_from_zero(false) || !self.reachable_from_zero(true)) {
            diags.push(Diagnostic::Disconnected);
        }

        diags
    }

    /// True when every node is reachable from node 0 following links forward
    /// (or backward when `reverse` is set). Both directions together give
    /// strong connectivity.
    fn reachable_from_zero(&self, reverse: bool) -> bool {
        let n = self.nodes.len();
        let mut seen = alloc::vec![false; n];
        let mut queue = Vec::with_capacity(n);
        seen[0] = true;
        queue.push(NodeId(0));
        let mut head = 0;
        while head < queue.len() {
            let v = queue[head];
            head += 1;
            for link in &self.links {
                let (from, to) = if reverse {
                    (link.dst, link.src)
                } else {
                    (link.src, link.dst)
                };
                if from == v && !seen[to.index()] {
                    seen[to.index()] = true;
                    queue.push(to);
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}
