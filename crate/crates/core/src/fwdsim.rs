//! Forwarding simulator for segment lists.
//!
//! Walks a packet from the source, branching at every ECMP split, and
//! collects the full set of realized routes. A segment list is congruent
//! with a path when the simulator yields exactly that path and nothing else.
//! The module also holds the exhaustive search for a minimal congruent list,
//! used to cross-check the analytic compilers at desk scale.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::path::HopPath;
use crate::routing::RoutingView;
use crate::sid::{ForwardingTables, FwdAction, Sid, SidKind, SrPath};
use crate::srcompile::CompileMode;
use crate::topology::{LinkId, NodeId, Topology};

/// Cap on realized routes per simulation.
pub const DEFAULT_ROUTE_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    /// Local adjacency SID active at a node other than its link's source;
    /// the segment list is malformed.
    MisplacedAdjSid { sid: Sid, at: NodeId },
    /// Hop budget exceeded, which means forwarding state is inconsistent.
    LoopGuard { at: NodeId },
    NoRoute { from: NodeId, toward: NodeId },
    TooManyRoutes { cap: usize },
    /// No table entry for a globally numbered SID.
    UnknownSid { sid: Sid, at: NodeId },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::MisplacedAdjSid { sid, at } => {
                write!(f, "local adjacency sid {sid:?} active at node {at}")
            }
            SimError::LoopGuard { at } => write!(f, "hop budget exceeded at node {at}"),
            SimError::NoRoute { from, toward } => {
                write!(f, "no route from node {from} toward node {toward}")
            }
            SimError::TooManyRoutes { cap } => write!(f, "more than {cap} realized routes"),
            SimError::UnknownSid { sid, at } => {
                write!(f, "no table entry for {sid:?} at node {at}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceAction {
    /// Active segment already designates this node.
    Pop,
    /// Routed forwarding over one ECMP choice.
    Forward(LinkId),
    /// Forced onto an exact link.
    Direct(LinkId),
}

/// One simulator step, tagged with the route index being built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub branch: usize,
    pub node: NodeId,
    pub sid: Sid,
    pub action: TraceAction,
}

struct Walker<'a> {
    t: &'a Topology,
    rv: &'a RoutingView,
    tables: &'a ForwardingTables,
    sids: &'a [Sid],
    max_hops: usize,
    cap: usize,
    routes: Vec<Vec<LinkId>>,
    trace: Option<&'a mut Vec<TraceEvent>>,
}

impl<'a> Walker<'a> {
    fn trace_ev(&mut self, node: NodeId, sid: Sid, action: TraceAction) {
        let branch = self.routes.len();
        if let Some(tr) = self.trace.as_deref_mut() {
            tr.push(TraceEvent {
                branch,
                node,
                sid,
                action,
            });
        }
    }

    fn walk(
        &mut self,
        v: NodeId,
        idx: usize,
        hops: usize,
        links: &mut Vec<LinkId>,
    ) -> Result<(), SimError> {
        if idx == self.sids.len() {
            if self.routes.len() >= self.cap {
                return Err(SimError::TooManyRoutes { cap: self.cap });
            }
            self.routes.push(links.clone());
            return Ok(());
        }
        let sid = self.sids[idx];
        if let Sid::Node(m) | Sid::DirectLink(m) = sid {
            if m == v {
                self.trace_ev(v, sid, TraceAction::Pop);
                return self.walk(v, idx + 1, hops, links);
            }
        }
        if hops >= self.max_hops {
            return Err(SimError::LoopGuard { at: v });
        }
        match sid {
            Sid::Node(m) => {
                let act = self
                    .tables
                    .table(v)
                    .action(SidKind::Node, m)
                    .ok_or(SimError::UnknownSid { sid, at: v })?;
                match act {
                    FwdAction::Routed(toward) => self.branch(v, toward, sid, idx, hops, links),
                    FwdAction::Direct(l) => self.cross(v, l, sid, idx, hops, links),
                }
            }
            Sid::DirectLink(m) => {
                let act = self
                    .tables
                    .table(v)
                    .action(SidKind::DirectLink, m)
                    .ok_or(SimError::UnknownSid { sid, at: v })?;
                match act {
                    FwdAction::Direct(l) => self.cross(v, l, sid, idx, hops, links),
                    FwdAction::Routed(toward) => self.branch(v, toward, sid, idx, hops, links),
                }
            }
            Sid::AdjLocal(e) => {
                if self.t.link(e).src != v {
                    return Err(SimError::MisplacedAdjSid { sid, at: v });
                }
                // crossing the link consumes the segment
                self.trace_ev(v, sid, TraceAction::Direct(e));
                links.push(e);
                let r = self.walk(self.t.link(e).dst, idx + 1, hops + 1, links);
                links.pop();
                r
            }
            Sid::AdjGlobal(e) => {
                if self.t.link(e).src == v {
                    self.trace_ev(v, sid, TraceAction::Direct(e));
                    links.push(e);
                    let r = self.walk(self.t.link(e).dst, idx + 1, hops + 1, links);
                    links.pop();
                    r
                } else {
                    // not yet at the link; steer toward its source with the
                    // segment still active
                    self.branch(v, self.t.link(e).src, sid, idx, hops, links)
                }
            }
        }
    }

    /// Follows every ECMP next hop toward `toward`, keeping the segment
    /// active.
    fn branch(
        &mut self,
        v: NodeId,
        toward: NodeId,
        sid: Sid,
        idx: usize,
        hops: usize,
        links: &mut Vec<LinkId>,
    ) -> Result<(), SimError> {
        let nh = self.rv.nexthops(v, toward);
        if nh.is_empty() {
            return Err(SimError::NoRoute { from: v, toward });
        }
        for i in 0..nh.len() {
            let w = self.rv.nexthops(v, toward)[i];
            let l = self
                .t
                .link_between(v, w)
                .expect("next hop without a link");
            self.trace_ev(v, sid, TraceAction::Forward(l));
            links.push(l);
            self.walk(w, idx, hops + 1, links)?;
            links.pop();
        }
        Ok(())
    }

    /// Forced traversal of one link with the segment kept active; a
    /// designating segment then pops on arrival.
    fn cross(
        &mut self,
        v: NodeId,
        l: LinkId,
        sid: Sid,
        idx: usize,
        hops: usize,
        links: &mut Vec<LinkId>,
    ) -> Result<(), SimError> {
        self.trace_ev(v, sid, TraceAction::Direct(l));
        links.push(l);
        let r = self.walk(self.t.link(l).dst, idx, hops + 1, links);
        links.pop();
        r
    }
}

fn run_walker(
    t: &Topology,
    rv: &RoutingView,
    tables: &ForwardingTables,
    srp: &SrPath,
    cap: usize,
    trace: Option<&mut Vec<TraceEvent>>,
) -> Result<Vec<Vec<LinkId>>, SimError> {
    let mut w = Walker {
        t,
        rv,
        tables,
        sids: &srp.sids,
        // any branch needing more than one full node sweep per segment loops
        max_hops: t.node_count() * srp.sids.len(),
        cap,
        routes: Vec::new(),
        trace,
    };
    let mut links = Vec::new();
    w.walk(srp.source, 0, 0, &mut links)?;
    let mut routes = w.routes;
    routes.sort_unstable();
    Ok(routes)
}

/// All routes the network can realize for this segment list, sorted.
pub fn simulate(
    t: &Topology,
    rv: &RoutingView,
    tables: &ForwardingTables,
    srp: &SrPath,
) -> Result<Vec<Vec<LinkId>>, SimError> {
    run_walker(t, rv, tables, srp, DEFAULT_ROUTE_CAP, None)
}

pub fn simulate_capped(
    t: &Topology,
    rv: &RoutingView,
    tables: &ForwardingTables,
    srp: &SrPath,
    cap: usize,
) -> Result<Vec<Vec<LinkId>>, SimError> {
    run_walker(t, rv, tables, srp, cap, None)
}

/// Like [`simulate`], also returning the per-hop decision log.
pub fn simulate_traced(
    t: &Topology,
    rv: &RoutingView,
    tables: &ForwardingTables,
    srp: &SrPath,
) -> Result<(Vec<Vec<LinkId>>, Vec<TraceEvent>), SimError> {
    let mut trace = Vec::new();
    let routes = run_walker(t, rv, tables, srp, DEFAULT_ROUTE_CAP, Some(&mut trace))?;
    Ok((routes, trace))
}

/// True when the segment list realizes exactly `p`: one route, equal to it.
pub fn check_congruence(
    t: &Topology,
    rv: &RoutingView,
    tables: &ForwardingTables,
    srp: &SrPath,
    p: &HopPath,
) -> Result<bool, SimError> {
    let want = match p.link_ids(t) {
        Ok(w) => w,
        Err(_) => return Ok(false),
    };
    match run_walker(t, rv, tables, srp, 1, None) {
        Ok(routes) => Ok(routes.len() == 1 && routes[0] == want),
        Err(SimError::TooManyRoutes { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

fn congruent_quiet(
    t: &Topology,
    rv: &RoutingView,
    tables: &ForwardingTables,
    srp: &SrPath,
    want: &[LinkId],
) -> bool {
    match run_walker(t, rv, tables, srp, 1, None) {
        Ok(routes) => routes.len() == 1 && routes[0] == want,
        Err(_) => false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchError {
    /// Exhaustive search is meant for small instances only.
    TooLarge { nodes: usize, path_links: usize },
    /// Nothing congruent up to twice the path length; forwarding state and
    /// compilers disagree badly if this ever fires.
    NotFound { bound: usize },
}

impl fmt::Display for SearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchError::TooLarge { nodes, path_links } => write!(
                f,
                "instance too large for exhaustive search: {nodes} nodes, path of {path_links} links"
            ),
            SearchError::NotFound { bound } => {
                write!(f, "no congruent segment list up to length {bound}")
            }
        }
    }
}

/// Maximum instance the exhaustive search accepts.
pub const SEARCH_MAX_NODES: usize = 12;
pub const SEARCH_MAX_PATH_LINKS: usize = 8;

/// Shortest congruent segment list for `p` by exhaustive enumeration,
/// breadth-first over lengths. Candidate segments are the ones a compiler
/// for this mode may use: Node-SIDs of path nodes plus, per mode, local
/// adjacency SIDs of path links or DL-SIDs of path nodes. Among equal-length
/// lists the lexicographically first by (target node, segment kind) wins, so
/// the result is deterministic.
pub fn minimal_congruent(
    t: &Topology,
    rv: &RoutingView,
    tables: &ForwardingTables,
    p: &HopPath,
    mode: CompileMode,
) -> Result<SrPath, SearchError> {
    let lambda = p.len_links();
    if t.node_count() > SEARCH_MAX_NODES || lambda > SEARCH_MAX_PATH_LINKS {
        return Err(SearchError::TooLarge {
            nodes: t.node_count(),
            path_links: lambda,
        });
    }
    let source = p.source();
    if lambda == 0 {
        return Ok(SrPath {
            source,
            sids: vec![],
        });
    }
    let want = p.link_ids(t).expect("path not realizable on this topology");

    // (target, kind rank) keyed alphabet; rank orders Node < DL < Adj
    let mut keyed: Vec<((NodeId, u8), Sid)> = Vec::new();
    for (i, &m) in p.nodes().iter().enumerate() {
        keyed.push(((m, 0), Sid::Node(m)));
        match mode {
            CompileMode::Pmsr => keyed.push(((m, 1), Sid::DirectLink(m))),
            CompileMode::Traditional => {
                if i > 0 {
                    let e = t
                        .link_between(p.nodes()[i - 1], m)
                        .expect("path not realizable on this topology");
                    keyed.push(((m, 2), Sid::AdjLocal(e)));
                }
            }
        }
    }
    keyed.sort_by_key(|&(k, _)| k);
    let alphabet: Vec<Sid> = keyed.iter().map(|&(_, s)| s).collect();
    let dest = p.dest();
    let immediate_pop =
        |s: &Sid| matches!(*s, Sid::Node(m) | Sid::DirectLink(m) if m == source);

    let bound = 2 * lambda;
    let mut sids: Vec<Sid> = Vec::new();
    for len in 1..=bound {
        if let Some(found) = extend(
            t, rv, tables, &alphabet, &want, source, dest, len, &mut sids, &immediate_pop,
        ) {
            return Ok(found);
        }
    }
    Err(SearchError::NotFound { bound })
}

#[allow(clippy::too_many_arguments)]
fn extend(
    t: &Topology,
    rv: &RoutingView,
    tables: &ForwardingTables,
    alphabet: &[Sid],
    want: &[LinkId],
    source: NodeId,
    dest: NodeId,
    len: usize,
    sids: &mut Vec<Sid>,
    immediate_pop: &dyn Fn(&Sid) -> bool,
) -> Option<SrPath> {
    if sids.len() == len {
        let srp = SrPath {
            source,
            sids: sids.clone(),
        };
        if congruent_quiet(t, rv, tables, &srp, want) {
            return Some(srp);
        }
        return None;
    }
    for &s in alphabet {
        if sids.is_empty() && immediate_pop(&s) {
            continue;
        }
        // the last segment must designate the destination
        if sids.len() + 1 == len && s.target_node(t) != dest {
            continue;
        }
        sids.push(s);
        let hit = extend(
            t, rv, tables, alphabet, want, source, dest, len, sids, immediate_pop,
        );
        sids.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sid::SidNumbering;
    use crate::testutil::{f7, names_to_path};

    struct Fx {
        t: Topology,
        rv: RoutingView,
        tables: ForwardingTables,
    }

    fn fx() -> Fx {
        let t = f7();
        let rv = RoutingView::build(&t);
        let tables = ForwardingTables::build(&t, &SidNumbering::default()).unwrap();
        Fx { t, rv, tables }
    }

    fn named_links(fx: &Fx, pairs: &[(&str, &str)]) -> Vec<LinkId> {
        pairs
            .iter()
            .map(|(a, b)| {
                fx.t.link_between(
                    fx.t.node_by_name(a).unwrap(),
                    fx.t.node_by_name(b).unwrap(),
                )
                .unwrap()
            })
            .collect()
    }

    #[test]
    fn node_sid_realizes_the_ecmp_set() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let srp = SrPath {
            source: id("n1"),
            sids: vec![Sid::Node(id("n7"))],
        };
        let routes = simulate(&fx.t, &fx.rv, &fx.tables, &srp).unwrap();
        assert_eq!(routes.len(), 2);
        let sp: Vec<Vec<LinkId>> = fx
            .rv
            .sp_set(id("n1"), id("n7"))
            .unwrap()
            .iter()
            .map(|p| p.link_ids(&fx.t).unwrap())
            .collect();
        assert_eq!(routes, sp);
    }

    #[test]
    fn dl_sid_forces_the_direct_link() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let srp = SrPath {
            source: id("n4"),
            sids: vec![Sid::DirectLink(id("n7"))],
        };
        let routes = simulate(&fx.t, &fx.rv, &fx.tables, &srp).unwrap();
        assert_eq!(routes, vec![named_links(&fx, &[("n4", "n5"), ("n5", "n7")])]);
    }

    #[test]
    fn empty_list_stays_put() {
        let fx = fx();
        let srp = SrPath {
            source: fx.t.node_by_name("n3").unwrap(),
            sids: vec![],
        };
        let routes = simulate(&fx.t, &fx.rv, &fx.tables, &srp).unwrap();
        assert_eq!(routes, vec![Vec::new()]);
    }

    #[test]
    fn misplaced_local_adj_errors() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let e = fx.t.link_between(id("n3"), id("n5")).unwrap();
        let srp = SrPath {
            source: id("n1"),
            sids: vec![Sid::AdjLocal(e)],
        };
        assert_eq!(
            simulate(&fx.t, &fx.rv, &fx.tables, &srp).unwrap_err(),
            SimError::MisplacedAdjSid {
                sid: Sid::AdjLocal(e),
                at: id("n1")
            }
        );
    }

    #[test]
    fn global_adj_walks_to_its_link_first() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let e = fx.t.link_between(id("n5"), id("n7")).unwrap();
        let srp = SrPath {
            source: id("n1"),
            sids: vec![Sid::AdjGlobal(e)],
        };
        let routes = simulate(&fx.t, &fx.rv, &fx.tables, &srp).unwrap();
        // two ECMP ways to reach n5, then the pinned link
        assert_eq!(
            routes,
            vec![
                named_links(&fx, &[("n1", "n3"), ("n3", "n4"), ("n4", "n5"), ("n5", "n7")]),
                named_links(&fx, &[("n1", "n3"), ("n3", "n5"), ("n5", "n7")]),
            ]
        );
    }

    #[test]
    fn pop_at_source_then_continue() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let srp = SrPath {
            source: id("n1"),
            sids: vec![Sid::Node(id("n1")), Sid::Node(id("n2"))],
        };
        let (routes, trace) = simulate_traced(&fx.t, &fx.rv, &fx.tables, &srp).unwrap();
        assert_eq!(routes, vec![named_links(&fx, &[("n1", "n2")])]);
        assert_eq!(trace[0].action, TraceAction::Pop);
        assert_eq!(trace[0].node, id("n1"));
    }

    #[test]
    fn route_cap_respected() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let srp = SrPath {
            source: id("n1"),
            sids: vec![Sid::Node(id("n7"))],
        };
        assert_eq!(
            simulate_capped(&fx.t, &fx.rv, &fx.tables, &srp, 1).unwrap_err(),
            SimError::TooManyRoutes { cap: 1 }
        );
    }

    #[test]
    fn congruence_needs_determinism_and_equality() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let p135 = names_to_path(&fx.t, &["n1", "n3", "n5"]);
        // two shortest paths to n5, so a bare Node-SID is not congruent
        let srp = SrPath {
            source: id("n1"),
            sids: vec![Sid::Node(id("n5"))],
        };
        assert!(!check_congruence(&fx.t, &fx.rv, &fx.tables, &srp, &p135).unwrap());

        let p134 = names_to_path(&fx.t, &["n1", "n3", "n4"]);
        let srp = SrPath {
            source: id("n1"),
            sids: vec![Sid::Node(id("n4"))],
        };
        assert!(check_congruence(&fx.t, &fx.rv, &fx.tables, &srp, &p134).unwrap());
        // deterministic but a different path
        let p12 = names_to_path(&fx.t, &["n1", "n2"]);
        assert!(!check_congruence(&fx.t, &fx.rv, &fx.tables, &srp, &p12).unwrap());
    }

    #[test]
    fn search_detour_path_traditional() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let p = names_to_path(&fx.t, &["n1", "n3", "n5", "n7"]);
        let got = minimal_congruent(&fx.t, &fx.rv, &fx.tables, &p, CompileMode::Traditional)
            .unwrap();
        let e35 = fx.t.link_between(id("n3"), id("n5")).unwrap();
        let e57 = fx.t.link_between(id("n5"), id("n7")).unwrap();
        assert_eq!(
            got.sids,
            vec![Sid::Node(id("n3")), Sid::AdjLocal(e35), Sid::AdjLocal(e57)]
        );
    }

    #[test]
    fn search_detour_path_dl() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let p = names_to_path(&fx.t, &["n1", "n3", "n5", "n7"]);
        let got = minimal_congruent(&fx.t, &fx.rv, &fx.tables, &p, CompileMode::Pmsr).unwrap();
        assert_eq!(
            got.sids,
            vec![Sid::DirectLink(id("n5")), Sid::DirectLink(id("n7"))]
        );
    }

    #[test]
    fn search_long_path_traditional() {
        let fx = fx();
        let id = |n: &str| fx.t.node_by_name(n).unwrap();
        let p = names_to_path(&fx.t, &["n1", "n2", "n3", "n4", "n5", "n6", "n7"]);
        let got = minimal_congruent(&fx.t, &fx.rv, &fx.tables, &p, CompileMode::Traditional)
            .unwrap();
        assert_eq!(
            got.sids,
            vec![Sid::Node(id("n2")), Sid::Node(id("n4")), Sid::Node(id("n7"))]
        );
    }

    #[test]
    fn search_trivial_path_is_empty() {
        let fx = fx();
        let p = HopPath::single(fx.t.node_by_name("n2").unwrap());
        let got = minimal_congruent(&fx.t, &fx.rv, &fx.tables, &p, CompileMode::Pmsr).unwrap();
        assert!(got.sids.is_empty());
    }

    #[test]
    fn search_rejects_large_instances() {
        let fx = fx();
        let p = names_to_path(&fx.t, &["n1", "n2", "n3", "n4", "n5", "n6", "n7"]);
        let big = crate::testutil::diamond_chain(8);
        let rv = RoutingView::build(&big);
        let tables = ForwardingTables::build(&big, &SidNumbering::default()).unwrap();
        let q = crate::path::HopPath::new(alloc::vec![
            crate::topology::NodeId(0),
            crate::topology::NodeId(1)
        ])
        .unwrap();
        assert!(matches!(
            minimal_congruent(&big, &rv, &tables, &q, CompileMode::Pmsr),
            Err(SearchError::TooLarge { .. })
        ));
        // and the path-length side of the bound
        assert!(p.len_links() <= SEARCH_MAX_PATH_LINKS);
    }
}
