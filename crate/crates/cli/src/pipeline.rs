//! The experiment pipeline behind `run` and `bench`: demand handling, flow
//! assignment, segment compilation, the post-compile congruence check, and
//! the deterministic report model.

use std::collections::BTreeMap;
use std::net::Ipv6Addr;
use std::time::Instant;

use serde::Serialize;

use srpath_core::fwdsim::check_congruence;
use srpath_core::path::HopPath;
use srpath_core::routing::RoutingView;
use srpath_core::sid::{ForwardingTables, FwdAction, Plane, Sid, SidKind, SidNumbering, SrPath};
use srpath_core::srcompile::{compile_all, CompileMode, CompileStats};
use srpath_core::te::{assign_flows, link_loads, AssignOptions, Assignment, Flow};
use srpath_core::topology::Topology;

use crate::CliError;

pub fn mode_name(mode: CompileMode) -> &'static str {
    match mode {
        CompileMode::Traditional => "traditional",
        CompileMode::Pmsr => "pmsr",
    }
}

#[derive(Debug, Serialize)]
pub struct TopologySummary {
    pub nodes: usize,
    pub links: usize,
}

#[derive(Debug, Serialize)]
pub struct DemandSummary {
    pub generated: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub acceptance_ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct AssignmentSummary {
    pub deviation_cycles: usize,
    pub max_link_utilization: f64,
}

#[derive(Debug, Serialize)]
pub struct ModeReport {
    /// Segment list length -> number of flows compiled to that length.
    pub histogram: BTreeMap<usize, usize>,
    pub total_segments: usize,
}

/// Everything `run` reports. Serialized as report.json except the timings,
/// which change between otherwise identical runs and would break the
/// byte-for-byte reproducibility of the report; they go to stdout instead.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub topology: TopologySummary,
    pub demand: DemandSummary,
    pub assignment: AssignmentSummary,
    pub modes: BTreeMap<&'static str, ModeReport>,
    #[serde(skip)]
    pub te_ms: f64,
    #[serde(skip)]
    pub sr_ms: f64,
}

pub struct RunOutcome {
    pub report: RunReport,
    pub assignment: Assignment,
    pub compiled: Vec<(CompileMode, Vec<(u64, SrPath)>, CompileStats)>,
}

fn ms(from: Instant) -> f64 {
    from.elapsed().as_secs_f64() * 1e3
}

/// Assigns the flows, compiles every accepted path in each requested mode,
/// and re-simulates every compiled list; any non-congruent list is an
/// internal bug and fails the run.
pub fn execute_run(
    t: &Topology,
    flows: &[Flow],
    opts: &AssignOptions,
    modes: &[CompileMode],
    num: &SidNumbering,
) -> Result<RunOutcome, CliError> {
    let te_start = Instant::now();
    let assignment = assign_flows(t, flows, opts).map_err(CliError::input)?;
    let te_ms = ms(te_start);

    let recomputed = link_loads(t, &assignment);
    if recomputed != assignment.link_loads {
        return Err(CliError::Verify(
            "stored link loads diverge from their recomputation".into(),
        ));
    }
    for link in t.links() {
        if recomputed[link.id.index()] >= link.capacity {
            return Err(CliError::Verify(format!(
                "link {} -> {} loaded to capacity",
                t.node(link.src).name,
                t.node(link.dst).name
            )));
        }
    }

    let rv = RoutingView::build(t);
    let tables = ForwardingTables::build(t, num).map_err(CliError::input)?;
    let batch: Vec<(u64, HopPath)> = assignment
        .accepted
        .iter()
        .map(|f| (f.id, f.path.clone()))
        .collect();

    let sr_start = Instant::now();
    let mut compiled = Vec::new();
    for &mode in modes {
        let (lists, stats) = compile_all(t, &rv, &batch, mode);
        compiled.push((mode, lists, stats));
    }
    let sr_ms = ms(sr_start);

    for (mode, lists, _) in &compiled {
        for ((id, srp), (_, p)) in lists.iter().zip(&batch) {
            let ok = check_congruence(t, &rv, &tables, srp, p)
                .map_err(|e| CliError::Verify(format!("flow {id}: {e}")))?;
            if !ok {
                return Err(CliError::Verify(format!(
                    "flow {id}: {} segment list is not congruent with its path",
                    mode_name(*mode)
                )));
            }
        }
    }

    let max_util = t
        .links()
        .iter()
        .map(|l| recomputed[l.id.index()] / l.capacity)
        .fold(0.0, f64::max);
    let generated = flows.len();
    let accepted = assignment.accepted.len();
    let report = RunReport {
        topology: TopologySummary {
            nodes: t.node_count(),
            links: t.link_count(),
        },
        demand: DemandSummary {
            generated,
            accepted,
            rejected: assignment.rejected.len(),
            acceptance_ratio: accepted as f64 / generated as f64,
        },
        assignment: AssignmentSummary {
            deviation_cycles: assignment.cycles,
            max_link_utilization: max_util,
        },
        modes: compiled
            .iter()
            .map(|(mode, _, stats)| {
                (
                    mode_name(*mode),
                    ModeReport {
                        histogram: stats.histogram.clone(),
                        total_segments: stats.total_segments,
                    },
                )
            })
            .collect(),
        te_ms,
        sr_ms,
    };
    Ok(RunOutcome {
        report,
        assignment,
        compiled,
    })
}

/// Path cost under the topology's link metrics.
pub fn path_cost(t: &Topology, p: &HopPath) -> u64 {
    p.link_ids(t)
        .expect("assigned path fits the topology")
        .iter()
        .map(|&l| u64::from(t.link(l).cost))
        .sum()
}

pub fn path_text(t: &Topology, p: &HopPath) -> String {
    let names: Vec<&str> = p.nodes().iter().map(|&n| t.node(n).name.as_str()).collect();
    names.join("-")
}

/// Textual segment: global SIDs by their encoded value, adjacency SIDs by
/// their link since they have no global number.
pub fn sid_token(t: &Topology, num: &SidNumbering, sid: &Sid) -> String {
    match num.encode(t, sid) {
        Some(value) => match num.plane() {
            Plane::Mpls => value.to_string(),
            Plane::Ipv6 => Ipv6Addr::from(value).to_string(),
        },
        None => {
            let (prefix, link) = match sid {
                Sid::AdjLocal(e) => ("adj", t.link(*e)),
                Sid::AdjGlobal(e) => ("adjg", t.link(*e)),
                _ => unreachable!("node and dl sids always encode"),
            };
            format!(
                "{prefix}:{}:{}",
                t.node(link.src).name,
                t.node(link.dst).name
            )
        }
    }
}

pub fn flows_csv(t: &Topology, flows: &[Flow], a: &Assignment) -> Vec<Vec<String>> {
    let mut rows = vec![vec![
        "flow".into(),
        "accepted".into(),
        "path".into(),
        "cost".into(),
    ]];
    let mut by_id: Vec<&Flow> = flows.iter().collect();
    by_id.sort_by_key(|f| f.id);
    let placed: BTreeMap<u64, &HopPath> =
        a.accepted.iter().map(|f| (f.id, &f.path)).collect();
    for f in by_id {
        let row = match placed.get(&f.id) {
            Some(p) => vec![
                f.id.to_string(),
                "true".into(),
                path_text(t, p),
                path_cost(t, p).to_string(),
            ],
            None => vec![f.id.to_string(), "false".into(), String::new(), String::new()],
        };
        rows.push(row);
    }
    rows
}

pub fn links_csv(t: &Topology, a: &Assignment) -> Vec<Vec<String>> {
    let mut rows = vec![vec![
        "src".into(),
        "dst".into(),
        "capacity".into(),
        "load".into(),
        "utilization".into(),
    ]];
    for l in t.links() {
        let load = a.link_loads[l.id.index()];
        rows.push(vec![
            t.node(l.src).name.clone(),
            t.node(l.dst).name.clone(),
            format_float(l.capacity),
            format_float(load),
            format_float(load / l.capacity),
        ]);
    }
    rows
}

pub fn srpaths_csv(t: &Topology, num: &SidNumbering, outcome: &RunOutcome) -> Vec<Vec<String>> {
    let mut rows = vec![vec![
        "flow".into(),
        "mode".into(),
        "segment_count".into(),
        "segments".into(),
    ]];
    for (mode, lists, _) in &outcome.compiled {
        for (id, srp) in lists {
            let tokens: Vec<String> =
                srp.sids.iter().map(|s| sid_token(t, num, s)).collect();
            rows.push(vec![
                id.to_string(),
                mode_name(*mode).into(),
                srp.len().to_string(),
                tokens.join(","),
            ]);
        }
    }
    rows
}

/// Shortest-roundtrip float text, the same digits serde_json would emit.
pub fn format_float(v: f64) -> String {
    let mut buf = ryu_format(v);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(v: f64) -> String {
    serde_json::to_string(&v).expect("finite float")
}

/// One `bench` measurement row.
pub struct BenchRow {
    pub admitted: usize,
    pub te_ms: f64,
    pub sr_ms: f64,
    pub cycles: usize,
}

pub fn bench_csv(rows: &[BenchRow]) -> Vec<Vec<String>> {
    let mut out = vec![vec![
        "admitted".into(),
        "te_ms".into(),
        "sr_ms".into(),
        "cycles".into(),
    ]];
    for r in rows {
        out.push(vec![
            r.admitted.to_string(),
            format!("{:.3}", r.te_ms),
            format!("{:.3}", r.sr_ms),
            r.cycles.to_string(),
        ]);
    }
    out
}

/// Forwarding table dump: one block per node, entries ordered by target id
/// with the Node-SID line before the DL-SID line.
pub fn tables_text(t: &Topology, num: &SidNumbering) -> Result<String, CliError> {
    let tables = ForwardingTables::build(t, num).map_err(CliError::input)?;
    let value_text = |v: u128| match num.plane() {
        Plane::Mpls => v.to_string(),
        Plane::Ipv6 => Ipv6Addr::from(v).to_string(),
    };
    let mut out = String::new();
    for table in tables.iter() {
        let owner = t.node(table.owner());
        out.push_str(&format!("table {} ({})\n", owner.name, owner.loopback));
        for e in table.entries() {
            let kind = match e.kind {
                SidKind::Node => "node",
                SidKind::DirectLink => "dl",
            };
            let action = match e.action {
                FwdAction::Routed(m) => format!("routed:{}", t.node(m).name),
                FwdAction::Direct(l) => format!(
                    "direct:{}->{}",
                    t.node(t.link(l).src).name,
                    t.node(t.link(l).dst).name
                ),
            };
            out.push_str(&format!(
                "  {kind} {} {} {action}\n",
                t.node(e.target).name,
                value_text(e.value)
            ));
        }
    }
    Ok(out)
}
