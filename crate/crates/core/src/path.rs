//! Hop-by-hop paths through a topology.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use crate::topology::{LinkId, NodeId, Topology};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathError {
    Empty,
    RepeatedNode(NodeId),
    /// Two consecutive path nodes with no link between them.
    NotAdjacent(NodeId, NodeId),
    NodeOutOfRange(NodeId),
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathError::Empty => write!(f, "empty path"),
            PathError::RepeatedNode(n) => write!(f, "node {n} repeats"),
            PathError::NotAdjacent(a, b) => write!(f, "no link {a} -> {b}"),
            PathError::NodeOutOfRange(n) => write!(f, "node {n} not in topology"),
        }
    }
}

/// A loop-free node sequence. Adjacency against a concrete topology is a
/// separate check ([`HopPath::link_ids`]) so pure path algebra stays cheap.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HopPath {
    nodes: Vec<NodeId>,
}

impl HopPath {
    pub fn new(nodes: Vec<NodeId>) -> Result<HopPath, PathError> {
        if nodes.is_empty() {
            return Err(PathError::Empty);
        }
        let mut seen = BTreeSet::new();
        for &n in &nodes {
            if !seen.insert(n) {
                return Err(PathError::RepeatedNode(n));
            }
        }
        Ok(HopPath { nodes })
    }

    /// The one-node path, source equal to destination.
    pub fn single(node: NodeId) -> HopPath {
        HopPath {
            nodes: alloc::vec![node],
        }
    }

    /// For callers that guarantee simplicity by construction.
    pub(crate) fn from_checked_vec(nodes: Vec<NodeId>) -> HopPath {
        debug_assert!(!nodes.is_empty());
        debug_assert!(nodes.iter().collect::<BTreeSet<_>>().len() == nodes.len());
        HopPath { nodes }
    }

    #[inline]
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    #[inline]
    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    #[inline]
    pub fn dest(&self) -> NodeId {
        *self.nodes.last().unwrap()
    }

    /// Number of links, one less than the number of nodes.
    #[inline]
    pub fn len_links(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.nodes.contains(&n)
    }

    pub fn position(&self, n: NodeId) -> Option<usize> {
        self.nodes.iter().position(|&x| x == n)
    }

    /// Node right before `n` on the path.
    pub fn prec(&self, n: NodeId) -> Option<NodeId> {
        match self.position(n) {
            Some(i) if i > 0 => Some(self.nodes[i - 1]),
            _ => None,
        }
    }

    /// Node right after `n` on the path.
    pub fn succ(&self, n: NodeId) -> Option<NodeId> {
        match self.position(n) {
            Some(i) if i + 1 < self.nodes.len() => Some(self.nodes[i + 1]),
            _ => None,
        }
    }

    /// Sub-path from `x` to `y`; requires `x` at or before `y` on this path.
    pub fn tep(&self, x: NodeId, y: NodeId) -> Option<HopPath> {
        let i = self.position(x)?;
        let j = self.position(y)?;
        if i > j {
            return None;
        }
        Some(HopPath {
            nodes: self.nodes[i..=j].to_vec(),
        })
    }

    /// Resolves consecutive node pairs to links, failing on a missing link.
    pub fn link_ids(&self, t: &Topology) -> Result<Vec<LinkId>, PathError> {
        for &n in &self.nodes {
            if n.index() >= t.node_count() {
                return Err(PathError::NodeOutOfRange(n));
            }
        }
        let mut links = Vec::with_capacity(self.len_links());
        for w in self.nodes.windows(2) {
            match t.link_between(w[0], w[1]) {
                Some(l) => links.push(l),
                None => return Err(PathError::NotAdjacent(w[0], w[1])),
            }
        }
        Ok(links)
    }

    /// Checks the path is realizable on `t`.
    pub fn validate_on(&self, t: &Topology) -> Result<(), PathError> {
        self.link_ids(t).map(|_| ())
    }
}
