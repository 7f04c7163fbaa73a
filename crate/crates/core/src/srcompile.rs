//! Deterministic path to segment list compilation.
//!
//! [`t_srp`] emits Node-SIDs for unique-shortest-path stretches and local
//! adjacency SIDs elsewhere. [`dl_srp`] rewrites such a list for networks
//! with DL-SIDs: every adjacency segment becomes the DL-SID of its far end,
//! and Node-SIDs that only existed to anchor the following adjacency are
//! dropped when DL forwarding already pins the same stretch.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::path::HopPath;
use crate::routing::{BiasedOutcome, RoutingView};
use crate::sid::{Sid, SrPath};
use crate::topology::Topology;

/// Which segment vocabulary a compiled list may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompileMode {
    /// Node-SIDs and local adjacency SIDs.
    Traditional,
    /// Node-SIDs and DL-SIDs only.
    Pmsr,
}

/// Compiles `p` into a congruent list of Node-SIDs and local adjacency
/// SIDs. Greedy: from the current node, the farthest path node reachable
/// congruently by one Node-SID is taken; a hop that no Node-SID can pin
/// becomes an adjacency segment.
pub fn t_srp(t: &Topology, rv: &RoutingView, p: &HopPath) -> SrPath {
    let source = p.source();
    let d = p.dest();
    let mut sids = Vec::new();
    let mut x = source;
    while x != d {
        let mut y = d;
        loop {
            let tep = p.tep(x, y).expect("x and y lie on p in order");
            if rv.spn(x, y) == 1 && rv.unique_sp(x, y).as_ref() == Some(&tep) {
                sids.push(Sid::Node(y));
                break;
            }
            if tep.len_links() == 1 {
                let e = t.link_between(x, y).expect("consecutive path nodes");
                sids.push(Sid::AdjLocal(e));
                break;
            }
            y = p.prec(y).expect("y stays ahead of x");
        }
        x = y;
    }
    SrPath { source, sids }
}

/// Rewrites a [`t_srp`] result into DL-SID vocabulary. Adjacency segments
/// map to the DL-SID of their far end. A Node-SID in front of an adjacency
/// segment survives only if dropping it would leave the stretch ambiguous:
/// with it gone, forwarding runs from the previous segment's node straight
/// toward the DL target, so the segment is redundant exactly when that
/// biased stretch is a single path equal to the corresponding piece of `p`.
pub fn dl_srp(t: &Topology, rv: &RoutingView, p: &HopPath, srp: &SrPath) -> SrPath {
    let n = srp.sids.len();
    let mut sids = Vec::new();
    for (i, &sid) in srp.sids.iter().enumerate() {
        match sid {
            Sid::AdjLocal(e) | Sid::AdjGlobal(e) => {
                sids.push(Sid::DirectLink(t.link(e).dst));
            }
            Sid::Node(y) => {
                let keep = if i + 1 == n {
                    // the final segment designates the destination
                    true
                } else if !srp.sids[i + 1].is_adj() {
                    true
                } else {
                    let z = srp.sids[i + 1].target_node(t);
                    let prev = if i == 0 {
                        srp.source
                    } else {
                        srp.sids[i - 1].target_node(t)
                    };
                    let tep = p.tep(prev, z).expect("segment targets lie on p");
                    match rv
                        .biased_unique(t, prev, z)
                        .expect("connected pair on p")
                    {
                        BiasedOutcome::Multiple => true,
                        BiasedOutcome::Unique(bp) => bp != tep,
                    }
                };
                if keep {
                    sids.push(Sid::Node(y));
                }
            }
            Sid::DirectLink(m) => sids.push(Sid::DirectLink(m)),
        }
    }
    SrPath {
        source: srp.source,
        sids,
    }
}

/// [`t_srp`], then [`dl_srp`] on top when the mode calls for it.
pub fn compile_path(t: &Topology, rv: &RoutingView, p: &HopPath, mode: CompileMode) -> SrPath {
    let srp = t_srp(t, rv, p);
    match mode {
        CompileMode::Traditional => srp,
        CompileMode::Pmsr => dl_srp(t, rv, p, &srp),
    }
}

/// Strict source route over `p`: one DL-SID per hop. Every segment's node
/// is adjacent to the previous one, so forwarding always takes the direct
/// link and the list is congruent by construction, at the cost of using
/// one segment per link.
pub fn strict_dl(p: &HopPath) -> SrPath {
    let sids = p.nodes()[1..].iter().map(|&m| Sid::DirectLink(m)).collect();
    SrPath {
        source: p.source(),
        sids,
    }
}

/// Segment count distribution over a batch of compiled paths.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CompileStats {
    /// Key: segment list length. Value: how many paths compiled to it.
    pub histogram: BTreeMap<usize, usize>,
    pub total_segments: usize,
    pub compiled: usize,
}

impl CompileStats {
    fn record(&mut self, len: usize) {
        *self.histogram.entry(len).or_insert(0) += 1;
        self.total_segments += len;
        self.compiled += 1;
    }
}

/// Compiles a batch of identified paths, preserving order.
pub fn compile_all(
    t: &Topology,
    rv: &RoutingView,
    paths: &[(u64, HopPath)],
    mode: CompileMode,
) -> (Vec<(u64, SrPath)>, CompileStats) {
    let mut out = Vec::with_capacity(paths.len());
    let mut stats = CompileStats::default();
    for (id, p) in paths {
        let srp = compile_path(t, rv, p, mode);
        stats.record(srp.len());
        out.push((*id, srp));
    }
    (out, stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{f7, names_to_path};
    use crate::topology::{EdgeSpec, NodeSpec, Topology};

    fn compile(t: &Topology, names: &[&str]) -> (SrPath, SrPath) {
        let rv = RoutingView::build(t);
        let p = names_to_path(t, names);
        let srp = t_srp(t, &rv, &p);
        let dl = dl_srp(t, &rv, &p, &srp);
        (srp, dl)
    }

    #[test]
    fn detour_path_needs_adjacencies() {
        let t = f7();
        let id = |n: &str| t.node_by_name(n).unwrap();
        let (srp, dl) = compile(&t, &["n1", "n3", "n5", "n7"]);
        let e35 = t.link_between(id("n3"), id("n5")).unwrap();
        let e57 = t.link_between(id("n5"), id("n7")).unwrap();
        assert_eq!(
            srp.sids,
            [Sid::Node(id("n3")), Sid::AdjLocal(e35), Sid::AdjLocal(e57)]
        );
        assert_eq!(
            dl.sids,
            [Sid::DirectLink(id("n5")), Sid::DirectLink(id("n7"))]
        );
    }

    #[test]
    fn long_path_compiles_to_node_sids() {
        let t = f7();
        let id = |n: &str| t.node_by_name(n).unwrap();
        let (srp, dl) = compile(&t, &["n1", "n2", "n3", "n4", "n5", "n6", "n7"]);
        let want = [Sid::Node(id("n2")), Sid::Node(id("n4")), Sid::Node(id("n7"))];
        assert_eq!(srp.sids, want);
        // no adjacency segments, so the DL rewrite changes nothing
        assert_eq!(dl.sids, want);
    }

    #[test]
    fn unique_shortest_path_is_one_node_sid() {
        let t = f7();
        let id = |n: &str| t.node_by_name(n).unwrap();
        let (srp, dl) = compile(&t, &["n1", "n2"]);
        assert_eq!(srp.sids, [Sid::Node(id("n2"))]);
        assert_eq!(dl.sids, [Sid::Node(id("n2"))]);
    }

    #[test]
    fn off_shortest_single_link_is_one_adjacency() {
        let t = f7();
        let id = |n: &str| t.node_by_name(n).unwrap();
        // routing prefers n5-n6-n7; the direct link needs pinning
        let (srp, dl) = compile(&t, &["n5", "n7"]);
        let e57 = t.link_between(id("n5"), id("n7")).unwrap();
        assert_eq!(srp.sids, [Sid::AdjLocal(e57)]);
        assert_eq!(dl.sids, [Sid::DirectLink(id("n7"))]);
    }

    #[test]
    fn anchor_node_sid_dropped_when_bias_pins_the_stretch() {
        let t = f7();
        let id = |n: &str| t.node_by_name(n).unwrap();
        let (srp, dl) = compile(&t, &["n1", "n3", "n5"]);
        let e35 = t.link_between(id("n3"), id("n5")).unwrap();
        assert_eq!(srp.sids, [Sid::Node(id("n3")), Sid::AdjLocal(e35)]);
        // from n1 the biased walk is exactly n1-n3-n5, so DL(n5) suffices
        assert_eq!(dl.sids, [Sid::DirectLink(id("n5"))]);
    }

    fn quad(names: [&str; 4], edges: &[(usize, usize, u32)]) -> Topology {
        let nodes = names.iter().map(|n| NodeSpec::named(n)).collect();
        let edges = edges
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

    #[test]
    fn anchor_kept_when_biased_walk_forks() {
        // three equal shortest paths s-z; biased walks from s reach z both
        // via x and via a, so DL(z) alone would fork
        let t = quad(
            ["s", "x", "a", "z"],
            &[(0, 1, 1), (0, 2, 2), (1, 3, 2), (1, 2, 1), (2, 3, 1)],
        );
        let id = |n: &str| t.node_by_name(n).unwrap();
        let (srp, dl) = compile(&t, &["s", "x", "z"]);
        let exz = t.link_between(id("x"), id("z")).unwrap();
        assert_eq!(srp.sids, [Sid::Node(id("x")), Sid::AdjLocal(exz)]);
        assert_eq!(
            dl.sids,
            [Sid::Node(id("x")), Sid::DirectLink(id("z"))]
        );
    }

    #[test]
    fn anchor_kept_when_biased_walk_goes_elsewhere() {
        // the unique biased walk from s runs s-b-z, not along p
        let t = quad(
            ["s", "a", "b", "z"],
            &[(0, 1, 1), (0, 2, 1), (2, 3, 1), (1, 3, 3)],
        );
        let id = |n: &str| t.node_by_name(n).unwrap();
        let (srp, dl) = compile(&t, &["s", "a", "z"]);
        let eaz = t.link_between(id("a"), id("z")).unwrap();
        assert_eq!(srp.sids, [Sid::Node(id("a")), Sid::AdjLocal(eaz)]);
        assert_eq!(
            dl.sids,
            [Sid::Node(id("a")), Sid::DirectLink(id("z"))]
        );
    }

    #[test]
    fn trivial_path_compiles_empty() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let p = HopPath::single(t.node_by_name("n4").unwrap());
        let srp = t_srp(&t, &rv, &p);
        assert!(srp.sids.is_empty());
        assert!(dl_srp(&t, &rv, &p, &srp).sids.is_empty());
    }

    #[test]
    fn strict_list_has_one_segment_per_link() {
        let t = f7();
        let id = |n: &str| t.node_by_name(n).unwrap();
        let p = names_to_path(&t, &["n1", "n2", "n3", "n4", "n5"]);
        let srp = strict_dl(&p);
        assert_eq!(srp.source, id("n1"));
        assert_eq!(
            srp.sids,
            [
                Sid::DirectLink(id("n2")),
                Sid::DirectLink(id("n3")),
                Sid::DirectLink(id("n4")),
                Sid::DirectLink(id("n5")),
            ]
        );
        assert!(strict_dl(&HopPath::single(id("n4"))).sids.is_empty());
    }

    #[test]
    fn batch_statistics() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let batch = [
            (7u64, names_to_path(&t, &["n1", "n2"])),
            (9u64, names_to_path(&t, &["n1", "n3", "n5", "n7"])),
            (11u64, names_to_path(&t, &["n5", "n7"])),
        ];
        let (out, stats) = compile_all(&t, &rv, &batch, CompileMode::Pmsr);
        assert_eq!(out.len(), 3);
        assert_eq!(out[1].0, 9);
        assert_eq!(stats.compiled, 3);
        assert_eq!(stats.total_segments, 4);
        assert_eq!(stats.histogram.get(&1), Some(&2));
        assert_eq!(stats.histogram.get(&2), Some(&1));
    }
}
