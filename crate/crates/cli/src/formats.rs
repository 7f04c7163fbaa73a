//! On-disk formats: native JSON topologies, GraphML import, demand files
//! (one JSON object per line) and the RFC 4180 CSV reports. All writers go
//! through [`atomic_write`] so readers never see a half-written file.

use std::fs;
use std::net::Ipv4Addr;
use std::path::Path;

use serde::{Deserialize, Serialize};

use srpath_core::te::Flow;
use srpath_core::topology::{EdgeSpec, Loopback, NodeSpec, Topology};

use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
struct JsonNode {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    loopback: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonEdge {
    a: String,
    b: String,
    cost: u32,
    capacity: f64,
}

/// Native topology file: named nodes with optional dotted-quad loopbacks,
/// and undirected edges referencing node names.
#[derive(Debug, Serialize, Deserialize)]
struct JsonTopology {
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
}

fn parse_loopback(s: &str, node: &str) -> Result<Loopback, CliError> {
    let addr: Ipv4Addr = s
        .parse()
        .map_err(|_| CliError::Input(format!("node {node}: bad loopback {s:?}")))?;
    Ok(Loopback::from_octets(addr.octets()))
}

fn build_topology(spec: JsonTopology) -> Result<Topology, CliError> {
    let mut nodes = Vec::with_capacity(spec.nodes.len());
    for n in &spec.nodes {
        let loopback = match &n.loopback {
            Some(s) => Some(parse_loopback(s, &n.name)?),
            None => None,
        };
        nodes.push(NodeSpec {
            name: n.name.clone(),
            loopback,
        });
    }
    let index_of = |name: &str| {
        spec.nodes
            .iter()
            .position(|n| n.name == name)
            .ok_or_else(|| CliError::Input(format!("edge references unknown node {name:?}")))
    };
    let mut edges = Vec::with_capacity(spec.edges.len());
    for e in &spec.edges {
        edges.push(EdgeSpec {
            a: index_of(&e.a)?,
            b: index_of(&e.b)?,
            cost: e.cost,
            capacity: e.capacity,
        });
    }
    Topology::from_undirected(nodes, edges).map_err(CliError::input)
}

pub fn load_json(path: &Path) -> Result<Topology, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let spec: JsonTopology = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    build_topology(spec)
}

/// Canonical JSON text for a topology: nodes in id order, each undirected
/// link pair once, ordered by endpoint ids. Loading it back reproduces the
/// topology exactly.
pub fn emit_json(t: &Topology) -> String {
    let nodes = t
        .nodes()
        .iter()
        .map(|n| JsonNode {
            name: n.name.clone(),
            loopback: Some(n.loopback.to_string()),
        })
        .collect();
    let edges = t
        .links()
        .iter()
        .filter(|l| l.src < l.dst)
        .map(|l| JsonEdge {
            a: t.node(l.src).name.clone(),
            b: t.node(l.dst).name.clone(),
            cost: l.cost,
            capacity: l.capacity,
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&JsonTopology { nodes, edges })
        .expect("topology serializes");
    out.push('\n');
    out
}

/// Loads a GraphML graph, taking node ids as names and applying one cost
/// and capacity to every edge. Parallel edges collapse into one and self
/// loops are dropped; both produce a warning.
pub fn load_graphml(
    path: &Path,
    default_cost: u32,
    default_capacity: f64,
) -> Result<(Topology, Vec<String>), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let doc = roxmltree::Document::parse(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let graph = doc
        .descendants()
        .find(|n| n.has_tag_name("graph"))
        .ok_or_else(|| CliError::Input(format!("{}: no graph element", path.display())))?;

    let mut names: Vec<String> = Vec::new();
    for node in graph.children().filter(|n| n.has_tag_name("node")) {
        let id = node
            .attribute("id")
            .ok_or_else(|| CliError::Input("node without id".into()))?;
        names.push(id.to_string());
    }
    if names.is_empty() {
        return Err(CliError::Input(format!(
            "{}: graph has no nodes",
            path.display()
        )));
    }
    let index_of = |id: &str| names.iter().position(|n| n == id);

    let mut warnings = Vec::new();
    let mut seen: Vec<(usize, usize)> = Vec::new();
    let mut edges = Vec::new();
    for edge in graph.children().filter(|n| n.has_tag_name("edge")) {
        let src = edge
            .attribute("source")
            .ok_or_else(|| CliError::Input("edge without source".into()))?;
        let dst = edge
            .attribute("target")
            .ok_or_else(|| CliError::Input("edge without target".into()))?;
        let a = index_of(src)
            .ok_or_else(|| CliError::Input(format!("edge references unknown node {src:?}")))?;
        let b = index_of(dst)
            .ok_or_else(|| CliError::Input(format!("edge references unknown node {dst:?}")))?;
        if a == b {
            warnings.push(format!("dropping self loop at {src}"));
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.contains(&key) {
            warnings.push(format!("collapsing parallel edge {src} -- {dst}"));
            continue;
        }
        seen.push(key);
        edges.push(EdgeSpec {
            a,
            b,
            cost: default_cost,
            capacity: default_capacity,
        });
    }
    let nodes = names.iter().map(|n| NodeSpec::named(n)).collect();
    let t = Topology::from_undirected(nodes, edges).map_err(CliError::input)?;
    Ok((t, warnings))
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonFlow {
    id: u64,
    src: String,
    dst: String,
    rate: f64,
}

/// One flow per line, endpoints by node name.
pub fn load_demands(path: &Path, t: &Topology) -> Result<Vec<Flow>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut flows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: JsonFlow = serde_json::from_str(line)
            .map_err(|e| CliError::Input(format!("{} line {}: {e}", path.display(), i + 1)))?;
        let resolve = |name: &str| {
            t.node_by_name(name).ok_or_else(|| {
                CliError::Input(format!(
                    "{} line {}: unknown node {name:?}",
                    path.display(),
                    i + 1
                ))
            })
        };
        flows.push(Flow {
            id: f.id,
            src: resolve(&f.src)?,
            dst: resolve(&f.dst)?,
            rate: f.rate,
        });
    }
    Ok(flows)
}

pub fn demands_text(t: &Topology, flows: &[Flow]) -> String {
    let mut out = String::new();
    for f in flows {
        let line = serde_json::to_string(&JsonFlow {
            id: f.id,
            src: t.node(f.src).name.clone(),
            dst: t.node(f.dst).name.clone(),
            rate: f.rate,
        })
        .expect("flow serializes");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Writes through a sibling temp file and renames over the target, so a
/// crash never leaves a truncated report behind.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, bytes).map_err(|e| CliError::Input(format!("{}: {e}", tmp.display())))?;
    fs::rename(tmp, path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub fn csv_bytes(rows: &[Vec<String>]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row).expect("csv row");
    }
    w.into_inner().expect("csv buffer")
}
