//! Simulator vs routing-state cross-checks: a lone Node-SID must realize
//! exactly the ECMP shortest-path set, a lone DL-SID exactly the
//! direct-link biased set, and the all-DL strict list exactly its own
//! hop-by-hop path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use srpath_core::fwdsim::{check_congruence, simulate};
use srpath_core::routing::RoutingView;
use srpath_core::sid::{ForwardingTables, Sid, SidNumbering, SrPath};
use srpath_core::srcompile::strict_dl;
use srpath_core::testutil::{random_simple_path, random_topology};
use srpath_core::topology::{LinkId, NodeId, Topology};

struct Net {
    t: Topology,
    rv: RoutingView,
    tables: ForwardingTables,
}

fn random_net(rng: &mut ChaCha8Rng, max_n: usize) -> Net {
    let n = rng.gen_range(4..=max_n);
    let extra = rng.gen_range(0..=n);
    let t = random_topology(rng, n, extra, 3, 10.0);
    let rv = RoutingView::build(&t);
    let tables = ForwardingTables::build(&t, &SidNumbering::default()).unwrap();
    Net { t, rv, tables }
}

fn link_sets(t: &Topology, paths: &[srpath_core::path::HopPath]) -> Vec<Vec<LinkId>> {
    let mut out: Vec<Vec<LinkId>> = paths
        .iter()
        .map(|p| p.link_ids(t).unwrap())
        .collect();
    out.sort();
    out
}

#[test]
fn single_sid_realizes_the_defining_path_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc405);
    let mut samples = 0usize;
    while samples < 240 {
        let net = random_net(&mut rng, 10);
        let n = net.t.node_count();
        for _ in 0..4 {
            let x = NodeId(rng.gen_range(0..n as u32));
            let m = NodeId(rng.gen_range(0..n as u32));
            if x == m {
                continue;
            }
            let node_list = SrPath {
                source: x,
                sids: vec![Sid::Node(m)],
            };
            let got = simulate(&net.t, &net.rv, &net.tables, &node_list).unwrap();
            assert_eq!(
                got,
                link_sets(&net.t, &net.rv.sp_set(x, m).unwrap()),
                "node sid route set diverges from sp({x},{m})"
            );

            let dl_list = SrPath {
                source: x,
                sids: vec![Sid::DirectLink(m)],
            };
            let got = simulate(&net.t, &net.rv, &net.tables, &dl_list).unwrap();
            assert_eq!(
                got,
                link_sets(&net.t, &net.rv.biased_paths(&net.t, x, m).unwrap()),
                "dl sid route set diverges from biased paths ({x},{m})"
            );
            samples += 1;
        }
    }
    println!("single-sid equivalence held on {samples} (graph, pair) samples");
}

#[test]
fn strict_list_is_congruent_with_one_segment_per_link() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x57c1);
    let mut samples = 0usize;
    while samples < 220 {
        let net = random_net(&mut rng, 10);
        for _ in 0..4 {
            let p = random_simple_path(&mut rng, &net.t, 6);
            let srp = strict_dl(&p);
            assert_eq!(srp.len(), p.len_links());
            assert!(
                check_congruence(&net.t, &net.rv, &net.tables, &srp, &p).unwrap(),
                "strict list not congruent with its own path"
            );
            samples += 1;
        }
    }
    println!("strict all-DL lists congruent on {samples} paths");
}

#[test]
fn tables_have_two_entries_per_remote_node() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ab1);
    for _ in 0..20 {
        let net = random_net(&mut rng, 12);
        let want = 2 * (net.t.node_count() - 1);
        for table in net.tables.iter() {
            assert_eq!(table.entries().len(), want);
        }
    }
}

#[test]
fn simulation_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdead);
    let net = random_net(&mut rng, 10);
    let n = net.t.node_count();
    for _ in 0..50 {
        let x = NodeId(rng.gen_range(0..n as u32));
        let m = NodeId(rng.gen_range(0..n as u32));
        if x == m {
            continue;
        }
        let srp = SrPath {
            source: x,
            sids: vec![Sid::Node(m)],
        };
        let a = simulate(&net.t, &net.rv, &net.tables, &srp).unwrap();
        let b = simulate(&net.t, &net.rv, &net.tables, &srp).unwrap();
        assert_eq!(a, b);
    }
}
