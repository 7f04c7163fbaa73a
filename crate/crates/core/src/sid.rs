//! Segment identifiers, their numeric encodings and per-node forwarding
//! tables.
//!
//! Node-SIDs and direct-link SIDs (DL-SIDs) are global and derived purely
//! from loopback addresses, so every router computes identical values with
//! no signaling. Adjacency SIDs exist in local and global flavors and are
//! only meaningful inside explicit segment lists; they get no table entries
//! and no numeric encoding here.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::topology::{LinkId, NodeId, Topology};

/// One segment in a segment list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sid {
    /// Steer along ECMP shortest paths to the node.
    Node(NodeId),
    /// Like [`Sid::Node`], except a node adjacent to the target always uses
    /// its direct link.
    DirectLink(NodeId),
    /// Cross exactly this link; understood only by the link's source node.
    AdjLocal(LinkId),
    /// Cross exactly this link, reaching its source node first if needed.
    AdjGlobal(LinkId),
}

impl Sid {
    /// The node this segment ultimately leads to.
    pub fn target_node(&self, t: &Topology) -> NodeId {
        match *self {
            Sid::Node(m) | Sid::DirectLink(m) => m,
            Sid::AdjLocal(e) | Sid::AdjGlobal(e) => t.link(e).dst,
        }
    }

    pub fn is_adj(&self) -> bool {
        matches!(self, Sid::AdjLocal(_) | Sid::AdjGlobal(_))
    }
}

/// A source node plus the segment stack steering packets away from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrPath {
    pub source: NodeId,
    pub sids: Vec<Sid>,
}

impl SrPath {
    pub fn len(&self) -> usize {
        self.sids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sids.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SidError {
    /// MPLS label block does not fit the 20 bit label space, or starts
    /// inside the reserved range.
    LabelSpace { base: u32, n_bits: u32 },
    BadIndexBits(u32),
    /// Two loopbacks map to the same per-device index.
    IndexCollision { a: String, b: String },
    /// The IPv6 plane needs odd device parts so the paired DL address stays
    /// free.
    EvenDevicePart { node: String },
}

impl fmt::Display for SidError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SidError::LabelSpace { base, n_bits } => write!(
                f,
                "label base {base} with {n_bits} index bits leaves the 20 bit label space"
            ),
            SidError::BadIndexBits(n) => write!(f, "bad index bit width {n}"),
            SidError::IndexCollision { a, b } => {
                write!(f, "loopback index collision between {a} and {b}")
            }
            SidError::EvenDevicePart { node } => {
                write!(f, "loopback of {node} has an even device part")
            }
        }
    }
}

/// Encoding plane for global SIDs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Mpls,
    Ipv6,
}

/// Deterministic loopback-to-SID numbering shared by all nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SidNumbering {
    plane: Plane,
    n_bits: u32,
    mpls_base: u32,
    ipv6_prefix: u64,
}

pub const DEFAULT_N_BITS: u32 = 16;
pub const DEFAULT_MPLS_BASE: u32 = 100_000;
pub const DEFAULT_IPV6_PREFIX: u64 = 0xfc00 << 48;

impl Default for SidNumbering {
    fn default() -> Self {
        SidNumbering::mpls(DEFAULT_N_BITS, DEFAULT_MPLS_BASE).unwrap()
    }
}

impl SidNumbering {
    /// MPLS numbering: node label = base + index, DL label = base + 2^n_bits
    /// + index, where index is the low n_bits of the loopback. The two label
    /// blocks and the 20 bit MPLS label space bound the configuration.
    pub fn mpls(n_bits: u32, base: u32) -> Result<SidNumbering, SidError> {
        if n_bits == 0 || n_bits > 19 {
            return Err(SidError::BadIndexBits(n_bits));
        }
        let top = base as u64 + (1u64 << (n_bits + 1));
        if base < 16 || top > 1 << 20 {
            return Err(SidError::LabelSpace { base, n_bits });
        }
        Ok(SidNumbering {
            plane: Plane::Mpls,
            n_bits,
            mpls_base: base,
            ipv6_prefix: 0,
        })
    }

    /// IPv6 numbering: the node SID is the loopback itself under `prefix`,
    /// the DL-SID is the address one above it.
    pub fn ipv6(prefix: u64) -> SidNumbering {
        SidNumbering {
            plane: Plane::Ipv6,
            n_bits: 32,
            mpls_base: 0,
            ipv6_prefix: prefix,
        }
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    fn index(&self, t: &Topology, node: NodeId) -> u64 {
        t.node(node).loopback.low_bits(self.n_bits) as u64
    }

    /// Numeric value of a node's Node-SID.
    pub fn node_value(&self, t: &Topology, node: NodeId) -> u128 {
        match self.plane {
            Plane::Mpls => self.mpls_base as u128 + self.index(t, node) as u128,
            Plane::Ipv6 => {
                ((self.ipv6_prefix as u128) << 64) | t.node(node).loopback.0 as u128
            }
        }
    }

    /// Numeric value of a node's DL-SID.
    pub fn dl_value(&self, t: &Topology, node: NodeId) -> u128 {
        match self.plane {
            Plane::Mpls => {
                self.mpls_base as u128 + (1u128 << self.n_bits) + self.index(t, node) as u128
            }
            Plane::Ipv6 => self.node_value(t, node) + 1,
        }
    }

    /// Numeric value of a segment, None for adjacency segments which have no
    /// globally computable encoding.
    pub fn encode(&self, t: &Topology, sid: &Sid) -> Option<u128> {
        match *sid {
            Sid::Node(m) => Some(self.node_value(t, m)),
            Sid::DirectLink(m) => Some(self.dl_value(t, m)),
            Sid::AdjLocal(_) | Sid::AdjGlobal(_) => None,
        }
    }

    /// Maps a numeric value back to (kind, device index), None if outside
    /// both blocks.
    pub fn decode(&self, value: u128) -> Option<(SidKind, u64)> {
        match self.plane {
            Plane::Mpls => {
                let base = self.mpls_base as u128;
                let block = 1u128 << self.n_bits;
                if value >= base && value < base + block {
                    Some((SidKind::Node, (value - base) as u64))
                } else if value >= base + block && value < base + 2 * block {
                    Some((SidKind::DirectLink, (value - base - block) as u64))
                } else {
                    None
                }
            }
            Plane::Ipv6 => {
                if (value >> 64) as u64 != self.ipv6_prefix {
                    return None;
                }
                let device = (value & u64::MAX as u128) as u64;
                if device % 2 == 1 {
                    Some((SidKind::Node, device))
                } else {
                    Some((SidKind::DirectLink, device - 1))
                }
            }
        }
    }

    /// Verifies every node gets a distinct, well-formed pair of values on
    /// this plane.
    pub fn check_topology(&self, t: &Topology) -> Result<(), SidError> {
        match self.plane {
            Plane::Mpls => {
                let mut seen: Vec<(u64, NodeId)> = Vec::with_capacity(t.node_count());
                for node in t.nodes() {
                    seen.push((self.index(t, node.id), node.id));
                }
                seen.sort_unstable();
                for w in seen.windows(2) {
                    if w[0].0 == w[1].0 {
                        return Err(SidError::IndexCollision {
                            a: t.node(w[0].1).name.clone(),
                            b: t.node(w[1].1).name.clone(),
                        });
                    }
                }
                Ok(())
            }
            Plane::Ipv6 => {
                for node in t.nodes() {
                    if node.loopback.0 % 2 == 0 {
                        return Err(SidError::EvenDevicePart {
                            node: node.name.clone(),
                        });
                    }
                }
                Ok(())
            }
        }
    }
}

/// Table entry kinds; only globally numbered SIDs appear in tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SidKind {
    Node,
    DirectLink,
}

/// What a node does with a matching packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FwdAction {
    /// Follow the ECMP routes toward this node; resolved against a routing
    /// view at forwarding time, so the entry survives route changes.
    Routed(NodeId),
    /// Push out this exact link, bypassing routing.
    Direct(LinkId),
}

#[derive(Debug, Clone)]
pub struct FtEntry {
    pub kind: SidKind,
    pub target: NodeId,
    pub value: u128,
    pub action: FwdAction,
}

/// Forwarding table of one node: a Node-SID and a DL-SID entry per remote
/// node, sorted by (target, kind).
#[derive(Debug, Clone)]
pub struct ForwardingTable {
    owner: NodeId,
    entries: Vec<FtEntry>,
}

impl ForwardingTable {
    fn build(t: &Topology, num: &SidNumbering, owner: NodeId) -> ForwardingTable {
        let mut entries = Vec::with_capacity(2 * (t.node_count() - 1));
        for m in t.nodes() {
            if m.id == owner {
                continue;
            }
            entries.push(FtEntry {
                kind: SidKind::Node,
                target: m.id,
                value: num.node_value(t, m.id),
                action: FwdAction::Routed(m.id),
            });
            let action = match t.link_between(owner, m.id) {
                Some(l) => FwdAction::Direct(l),
                None => FwdAction::Routed(m.id),
            };
            entries.push(FtEntry {
                kind: SidKind::DirectLink,
                target: m.id,
                value: num.dl_value(t, m.id),
                action,
            });
        }
        entries.sort_by_key(|e| (e.target, e.kind));
        ForwardingTable { owner, entries }
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    pub fn entries(&self) -> &[FtEntry] {
        &self.entries
    }

    pub fn action(&self, kind: SidKind, target: NodeId) -> Option<FwdAction> {
        self.entries
            .binary_search_by_key(&(target, kind), |e| (e.target, e.kind))
            .ok()
            .map(|i| self.entries[i].action)
    }
}

/// Tables for every node, indexed by node id.
#[derive(Debug, Clone)]
pub struct ForwardingTables {
    tables: Vec<ForwardingTable>,
}

impl ForwardingTables {
    pub fn build(t: &Topology, num: &SidNumbering) -> Result<ForwardingTables, SidError> {
        num.check_topology(t)?;
        let tables = t
            .nodes()
            .iter()
            .map(|n| ForwardingTable::build(t, num, n.id))
            .collect();
        Ok(ForwardingTables { tables })
    }

    pub fn table(&self, n: NodeId) -> &ForwardingTable {
        &self.tables[n.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &ForwardingTable> {
        self.tables.iter()
    }
}
