//! All-pairs equal-cost-multipath routing state.
//!
//! One Dijkstra run per source yields distances, a shortest-path predecessor
//! DAG, shortest-path counts and ECMP next-hop sets. Path enumeration walks
//! the DAG and is capped, since path counts grow exponentially on dense
//! graphs. Counts themselves saturate instead of overflowing.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt;

use crate::path::HopPath;
use crate::topology::{NodeId, Topology};

/// Result cap for path-set enumeration.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

/// Shortest-path counts clamp here; anything at the cap means "at least this
/// many".
pub const SPN_CAP: u32 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathEnumError {
    TooManyPaths { cap: usize },
    Unreachable { from: NodeId, to: NodeId },
}

impl fmt::Display for PathEnumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathEnumError::TooManyPaths { cap } => {
                write!(f, "more than {cap} paths")
            }
            PathEnumError::Unreachable { from, to } => {
                write!(f, "no route from node {from} to node {to}")
            }
        }
    }
}

/// Outcome of probing the biased path set for uniqueness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BiasedOutcome {
    Unique(HopPath),
    Multiple,
}

#[derive(Debug, Clone)]
pub struct RoutingView {
    n: usize,
    /// Flattened src-major distance matrix, u64::MAX when unreachable.
    dist: Vec<u64>,
    /// Shortest-path counts, clamped at [`SPN_CAP`].
    spn: Vec<u32>,
    /// Per (src, v): predecessors of v on shortest paths from src, ascending.
    preds: Vec<Vec<NodeId>>,
    /// Per (src, dst): ECMP next hops out of src toward dst, ascending.
    nexthops: Vec<Vec<NodeId>>,
}

impl RoutingView {
    pub fn build(t: &Topology) -> RoutingView {
        let n = t.node_count();
        let mut dist = vec![u64::MAX; n * n];
        let mut spn = vec![0u32; n * n];
        let mut preds: Vec<Vec<NodeId>> = vec![Vec::new(); n * n];
        let mut nexthops: Vec<Vec<NodeId>> = vec![Vec::new(); n * n];

        let mut drow = vec![u64::MAX; n];
        let mut done = vec![false; n];
        for src in 0..n {
            drow.fill(u64::MAX);
            done.fill(false);
            drow[src] = 0;
            let mut heap: BinaryHeap<Reverse<(u64, u32)>> = BinaryHeap::new();
            heap.push(Reverse((0, src as u32)));
            while let Some(Reverse((d, v))) = heap.pop() {
                let vi = v as usize;
                if done[vi] {
                    continue;
                }
                done[vi] = true;
                for &l in t.out_links(NodeId(v)) {
                    let link = t.link(l);
                    let nd = d + link.cost as u64;
                    if nd < drow[link.dst.index()] {
                        drow[link.dst.index()] = nd;
                        heap.push(Reverse((nd, link.dst.0)));
                    }
                }
            }

            for link in t.links() {
                let du = drow[link.src.index()];
                if du != u64::MAX && du + link.cost as u64 == drow[link.dst.index()] {
                    preds[src * n + link.dst.index()].push(link.src);
                }
            }
            for row in &mut preds[src * n..src * n + n] {
                row.sort_unstable();
            }

            // Counts accumulate in nondecreasing distance order; predecessors
            // always lie strictly closer because costs are positive.
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_unstable_by_key(|&v| (drow[v], v));
            spn[src * n + src] = 1;
            for &v in &order {
                if v == src || drow[v] == u64::MAX {
                    continue;
                }
                let mut count: u64 = 0;
                for &u in &preds[src * n + v] {
                    count += spn[src * n + u.index()] as u64;
                    if count >= SPN_CAP as u64 {
                        count = SPN_CAP as u64;
                        break;
                    }
                }
                spn[src * n + v] = count as u32;
            }

            dist[src * n..src * n + n].copy_from_slice(&drow);
        }

        // A link src -> w starts a shortest path to dst exactly when its cost
        // plus dist(w, dst) meets dist(src, dst).
        for src in 0..n {
            for dst in 0..n {
                if src == dst || dist[src * n + dst] == u64::MAX {
                    continue;
                }
                for &l in t.out_links(NodeId(src as u32)) {
                    let link = t.link(l);
                    let w = link.dst;
                    let via = dist[w.index() * n + dst];
                    if via != u64::MAX && link.cost as u64 + via == dist[src * n + dst] {
                        nexthops[src * n + dst].push(w);
                    }
                }
            }
        }

        RoutingView {
            n,
            dist,
            spn,
            preds,
            nexthops,
        }
    }

    #[inline]
    fn at(&self, x: NodeId, y: NodeId) -> usize {
        x.index() * self.n + y.index()
    }

    /// IGP distance, None when unreachable.
    pub fn dist(&self, x: NodeId, y: NodeId) -> Option<u64> {
        match self.dist[self.at(x, y)] {
            u64::MAX => None,
            d => Some(d),
        }
    }

    /// Number of distinct shortest paths, clamped at [`SPN_CAP`]; zero when
    /// unreachable.
    pub fn spn(&self, x: NodeId, y: NodeId) -> u32 {
        self.spn[self.at(x, y)]
    }

    /// ECMP next hops out of `x` toward `y`, ascending by node id.
    pub fn nexthops(&self, x: NodeId, y: NodeId) -> &[NodeId] {
        &self.nexthops[self.at(x, y)]
    }

    /// Every shortest path from `x` to `y`, sorted by node sequence.
    pub fn sp_set(&self, x: NodeId, y: NodeId) -> Result<Vec<HopPath>, PathEnumError> {
        self.sp_set_capped(x, y, DEFAULT_PATH_CAP)
    }

    pub fn sp_set_capped(
        &self,
        x: NodeId,
        y: NodeId,
        cap: usize,
    ) -> Result<Vec<HopPath>, PathEnumError> {
        if self.dist[self.at(x, y)] == u64::MAX {
            return Err(PathEnumError::Unreachable { from: x, to: y });
        }
        let mut out = Vec::new();
        let mut rev = vec![y];
        self.collect_sp(x, y, &mut rev, &mut out, cap)?;
        out.sort_unstable();
        Ok(out)
    }

    fn collect_sp(
        &self,
        x: NodeId,
        v: NodeId,
        rev: &mut Vec<NodeId>,
        out: &mut Vec<HopPath>,
        cap: usize,
    ) -> Result<(), PathEnumError> {
        if v == x {
            if out.len() >= cap {
                return Err(PathEnumError::TooManyPaths { cap });
            }
            out.push(HopPath::from_checked_vec(rev.iter().rev().copied().collect()));
            return Ok(());
        }
        for i in 0..self.preds[self.at(x, v)].len() {
            let u = self.preds[self.at(x, v)][i];
            rev.push(u);
            self.collect_sp(x, u, rev, out, cap)?;
            rev.pop();
        }
        Ok(())
    }

    /// The shortest path when it is unique, None otherwise.
    pub fn unique_sp(&self, x: NodeId, y: NodeId) -> Option<HopPath> {
        if self.spn(x, y) != 1 {
            return None;
        }
        let mut rev = vec![y];
        let mut v = y;
        while v != x {
            let ps = &self.preds[self.at(x, v)];
            debug_assert_eq!(ps.len(), 1);
            v = ps[0];
            rev.push(v);
        }
        rev.reverse();
        Some(HopPath::from_checked_vec(rev))
    }

    /// Shortest paths under the direct-link bias: at every node holding a
    /// link straight to the target, that link is taken no matter its cost;
    /// elsewhere ECMP next hops apply. Sorted by node sequence.
    pub fn biased_paths(
        &self,
        t: &Topology,
        x: NodeId,
        y: NodeId,
    ) -> Result<Vec<HopPath>, PathEnumError> {
        self.biased_paths_capped(t, x, y, DEFAULT_PATH_CAP)
    }

    pub fn biased_paths_capped(
        &self,
        t: &Topology,
        x: NodeId,
        y: NodeId,
        cap: usize,
    ) -> Result<Vec<HopPath>, PathEnumError> {
        debug_assert_eq!(t.node_count(), self.n);
        let mut out = Vec::new();
        let mut prefix = vec![x];
        self.collect_biased(t, x, y, &mut prefix, &mut out, cap)?;
        out.sort_unstable();
        Ok(out)
    }

    fn collect_biased(
        &self,
        t: &Topology,
        v: NodeId,
        y: NodeId,
        prefix: &mut Vec<NodeId>,
        out: &mut Vec<HopPath>,
        cap: usize,
    ) -> Result<(), PathEnumError> {
        if v == y {
            if out.len() >= cap {
                return Err(PathEnumError::TooManyPaths { cap });
            }
            out.push(HopPath::from_checked_vec(prefix.clone()));
            return Ok(());
        }
        if t.link_between(v, y).is_some() {
            if out.len() >= cap {
                return Err(PathEnumError::TooManyPaths { cap });
            }
            prefix.push(y);
            out.push(HopPath::from_checked_vec(prefix.clone()));
            prefix.pop();
            return Ok(());
        }
        let nh = self.nexthops(v, y);
        if nh.is_empty() {
            return Err(PathEnumError::Unreachable { from: v, to: y });
        }
        for i in 0..nh.len() {
            let w = self.nexthops(v, y)[i];
            prefix.push(w);
            self.collect_biased(t, w, y, prefix, out, cap)?;
            prefix.pop();
        }
        Ok(())
    }

    /// Probes whether the biased path set is a single path without
    /// enumerating it all.
    pub fn biased_unique(
        &self,
        t: &Topology,
        x: NodeId,
        y: NodeId,
    ) -> Result<BiasedOutcome, PathEnumError> {
        match self.biased_paths_capped(t, x, y, 1) {
            Ok(mut v) => {
                debug_assert_eq!(v.len(), 1);
                Ok(BiasedOutcome::Unique(v.pop().unwrap()))
            }
            Err(PathEnumError::TooManyPaths { .. }) => Ok(BiasedOutcome::Multiple),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{diamond_chain, f7, names_to_path, path_names};
    use alloc::string::String;
    use alloc::vec;

    #[test]
    fn f7_distances_and_counts() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let id = |n: &str| t.node_by_name(n).unwrap();
        let cases: &[(&str, &str, u64, u32)] = &[
            ("n1", "n2", 1, 1),
            ("n1", "n4", 2, 1),
            ("n1", "n5", 3, 2),
            ("n1", "n7", 5, 2),
            ("n2", "n4", 2, 1),
            ("n3", "n5", 2, 2),
            ("n3", "n7", 4, 2),
            ("n4", "n7", 3, 1),
            ("n5", "n7", 2, 1),
        ];
        for &(a, b, d, k) in cases {
            assert_eq!(rv.dist(id(a), id(b)), Some(d), "dist {a}->{b}");
            assert_eq!(rv.spn(id(a), id(b)), k, "spn {a}->{b}");
            // symmetric topology, symmetric answers
            assert_eq!(rv.dist(id(b), id(a)), Some(d));
            assert_eq!(rv.spn(id(b), id(a)), k);
        }
    }

    #[test]
    fn f7_nexthops() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let id = |n: &str| t.node_by_name(n).unwrap();
        assert_eq!(rv.nexthops(id("n1"), id("n5")), &[id("n3")]);
        assert_eq!(rv.nexthops(id("n3"), id("n5")), &[id("n4"), id("n5")]);
        assert_eq!(rv.nexthops(id("n3"), id("n7")), &[id("n4"), id("n5")]);
        assert!(rv.nexthops(id("n2"), id("n2")).is_empty());
    }

    #[test]
    fn f7_sp_set_and_unique() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let id = |n: &str| t.node_by_name(n).unwrap();
        let set = rv.sp_set(id("n1"), id("n7")).unwrap();
        let got: Vec<Vec<String>> = set.iter().map(|p| path_names(&t, p)).collect();
        assert_eq!(
            got,
            vec![
                vec!["n1", "n3", "n4", "n5", "n6", "n7"],
                vec!["n1", "n3", "n5", "n6", "n7"],
            ]
            .into_iter()
            .map(|v| v.into_iter().map(String::from).collect::<Vec<_>>())
            .collect::<Vec<_>>()
        );

        let p = rv.unique_sp(id("n5"), id("n7")).unwrap();
        assert_eq!(path_names(&t, &p), ["n5", "n6", "n7"]);
        assert!(rv.unique_sp(id("n3"), id("n5")).is_none());
    }

    #[test]
    fn same_node_gives_trivial_path() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let n3 = t.node_by_name("n3").unwrap();
        assert_eq!(rv.dist(n3, n3), Some(0));
        assert_eq!(rv.spn(n3, n3), 1);
        let set = rv.sp_set(n3, n3).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set[0].nodes(), &[n3]);
        assert_eq!(rv.unique_sp(n3, n3).unwrap().nodes(), &[n3]);
    }

    #[test]
    fn f7_biased_paths() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let id = |n: &str| t.node_by_name(n).unwrap();

        let b = rv.biased_paths(&t, id("n1"), id("n5")).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(path_names(&t, &b[0]), ["n1", "n3", "n5"]);

        // the n5 -> n7 link costs 3 and is still forced
        let b = rv.biased_paths(&t, id("n4"), id("n7")).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(path_names(&t, &b[0]), ["n4", "n5", "n7"]);

        let b = rv.biased_paths(&t, id("n1"), id("n7")).unwrap();
        let got: Vec<Vec<String>> = b.iter().map(|p| path_names(&t, p)).collect();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0], ["n1", "n3", "n4", "n5", "n7"]);
        assert_eq!(got[1], ["n1", "n3", "n5", "n7"]);

        match rv.biased_unique(&t, id("n1"), id("n5")).unwrap() {
            BiasedOutcome::Unique(p) => assert_eq!(path_names(&t, &p), ["n1", "n3", "n5"]),
            BiasedOutcome::Multiple => panic!("expected unique"),
        }
        assert_eq!(
            rv.biased_unique(&t, id("n1"), id("n7")).unwrap(),
            BiasedOutcome::Multiple
        );
    }

    #[test]
    fn bias_applies_at_the_source() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let id = |n: &str| t.node_by_name(n).unwrap();
        // n3 -> n5 has a direct link of cost 2 next to an equal-cost detour;
        // the bias forces the direct link already at the source.
        let b = rv.biased_paths(&t, id("n3"), id("n5")).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(path_names(&t, &b[0]), ["n3", "n5"]);
    }

    #[test]
    fn path_counts_saturate() {
        let t = diamond_chain(33);
        let rv = RoutingView::build(&t);
        let s = NodeId(0);
        let e = NodeId((t.node_count() - 1) as u32);
        assert_eq!(rv.spn(s, e), SPN_CAP);
    }

    #[test]
    fn sp_set_cap_errors() {
        let t = diamond_chain(12); // 4096 shortest paths
        let rv = RoutingView::build(&t);
        let s = NodeId(0);
        let e = NodeId((t.node_count() - 1) as u32);
        assert_eq!(rv.spn(s, e), 1 << 12);
        assert_eq!(
            rv.sp_set_capped(s, e, 1000).unwrap_err(),
            PathEnumError::TooManyPaths { cap: 1000 }
        );
        assert_eq!(rv.sp_set(s, e).unwrap().len(), 4096);
    }

    #[test]
    fn unique_sp_matches_sp_set() {
        let t = f7();
        let rv = RoutingView::build(&t);
        let p = names_to_path(&t, &["n2", "n3", "n4"]);
        let n2 = t.node_by_name("n2").unwrap();
        let n4 = t.node_by_name("n4").unwrap();
        assert_eq!(rv.unique_sp(n2, n4).unwrap(), p);
        assert_eq!(rv.sp_set(n2, n4).unwrap(), vec![p]);
    }
}
