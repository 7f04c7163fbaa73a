//! `srpath`: topology tooling, the TE + segment compilation pipeline, and a
//! forwarding simulator for checking segment lists by hand.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use srpath_cli::formats::{
    atomic_write, csv_bytes, demands_text, emit_json, load_demands, load_graphml, load_json,
};
use srpath_cli::pipeline::{
    bench_csv, execute_run, flows_csv, links_csv, path_text, srpaths_csv, tables_text, BenchRow,
};
use srpath_cli::CliError;

use srpath_core::fwdsim::{simulate_traced, TraceAction, TraceEvent};
use srpath_core::path::HopPath;
use srpath_core::routing::RoutingView;
use srpath_core::sid::{ForwardingTables, Sid, SidNumbering, SrPath};
use srpath_core::srcompile::CompileMode;
use srpath_core::te::{generate_demands, AssignOptions, DemandConfig, Flow};
use srpath_core::topology::{NodeId, Topology};

#[derive(Parser)]
#[command(name = "srpath", version, about = "Segment list compilation for network paths")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Topology inspection and conversion.
    Topo {
        #[command(subcommand)]
        cmd: TopoCmd,
    },
    /// Generate or load demands, assign flows, compile and verify segment
    /// lists, and write the report files.
    Run(RunArgs),
    /// Time flow assignment and segment compilation over growing demand
    /// prefixes.
    Bench(BenchArgs),
    /// Simulate one segment list and optionally check it against a path.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum TopoCmd {
    /// Parse and validate a topology file.
    Validate { file: PathBuf },
    /// Convert GraphML to the native JSON format.
    Convert {
        file: PathBuf,
        /// Link cost applied to every edge.
        #[arg(long, default_value_t = 1)]
        cost: u32,
        /// Link capacity applied to every edge, b/s.
        #[arg(long, default_value_t = 1e9)]
        capacity: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print every node's SID forwarding table.
    Tables {
        file: PathBuf,
        #[command(flatten)]
        numbering: NumberingArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PlaneArg {
    Mpls,
    Ipv6,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Traditional,
    Pmsr,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<CompileMode> {
        match self {
            ModeArg::Traditional => vec![CompileMode::Traditional],
            ModeArg::Pmsr => vec![CompileMode::Pmsr],
            ModeArg::Both => vec![CompileMode::Traditional, CompileMode::Pmsr],
        }
    }
}

#[derive(Args, Clone, Copy)]
struct NumberingArgs {
    /// SID value plane.
    #[arg(long, value_enum, default_value_t = PlaneArg::Mpls)]
    plane: PlaneArg,
    /// Index width in bits for MPLS labels.
    #[arg(long, default_value_t = 16)]
    n_bits: u32,
    /// First label of the block.
    #[arg(long, default_value_t = 100_000)]
    mpls_base: u32,
}

impl NumberingArgs {
    fn numbering(&self) -> Result<SidNumbering, CliError> {
        match self.plane {
            PlaneArg::Mpls => SidNumbering::mpls(self.n_bits, self.mpls_base)
                .map_err(|e| CliError::Usage(e.to_string())),
            PlaneArg::Ipv6 => Ok(SidNumbering::ipv6(srpath_core::sid::DEFAULT_IPV6_PREFIX)),
        }
    }
}

#[derive(Args)]
struct DemandArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Fraction of nodes acting as traffic edges.
    #[arg(long, default_value_t = 0.40)]
    pe_frac: f64,
    /// Fraction of edge pairs exchanging traffic.
    #[arg(long, default_value_t = 0.20)]
    pair_frac: f64,
    /// Mean flow count per direction of an active pair.
    #[arg(long, default_value_t = 3.5)]
    mean_flows: f64,
    /// Per-direction rate budget as a fraction of link capacity.
    #[arg(long, default_value_t = 0.10)]
    rate_frac: f64,
}

impl DemandArgs {
    fn config(&self) -> DemandConfig {
        DemandConfig {
            pe_fraction: self.pe_frac,
            active_pair_fraction: self.pair_frac,
            mean_flows: self.mean_flows,
            rate_fraction: self.rate_frac,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    topology: PathBuf,
    #[command(flatten)]
    demand: DemandArgs,
    /// Demand file to use instead of generating one.
    #[arg(long)]
    demands: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    mode: ModeArg,
    /// Deviation cycle budget for the flow assignment.
    #[arg(long, default_value_t = 50)]
    max_cycles: usize,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    #[command(flatten)]
    numbering: NumberingArgs,
}

#[derive(Args)]
struct BenchArgs {
    topology: PathBuf,
    #[command(flatten)]
    demand: DemandArgs,
    /// Demand prefix growth per sweep point.
    #[arg(long, default_value_t = 300)]
    flows_step: usize,
    /// Measurement repeats per sweep point.
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Pmsr)]
    mode: ModeArg,
    #[arg(long, default_value_t = 50)]
    max_cycles: usize,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    topology: PathBuf,
    /// Node the packet enters at.
    #[arg(long)]
    source: String,
    /// Comma-separated segments: node:N, dl:N, adj:SRC:DST, adjg:SRC:DST.
    #[arg(long)]
    sids: String,
    /// Comma-separated node names; checks the list realizes exactly this
    /// path.
    #[arg(long)]
    path: Option<String>,
    /// Print every forwarding decision.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    numbering: NumberingArgs,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let _ = e.print();
            std::process::exit(1);
        }
    };
    if let Err(e) = dispatch(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Topo { cmd } => topo(cmd),
        Cmd::Run(args) => run(args),
        Cmd::Bench(args) => bench(args),
        Cmd::Verify(args) => verify(args),
    }
}

fn topo(cmd: TopoCmd) -> Result<(), CliError> {
    match cmd {
        TopoCmd::Validate { file } => {
            let t = load_json(&file)?;
            println!(
                "ok: {} nodes, {} links",
                t.node_count(),
                t.link_count()
            );
            Ok(())
        }
        TopoCmd::Convert {
            file,
            cost,
            capacity,
            out,
        } => {
            let (t, warnings) = load_graphml(&file, cost, capacity)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            atomic_write(&out, emit_json(&t).as_bytes())?;
            println!(
                "wrote {} ({} nodes, {} links)",
                out.display(),
                t.node_count(),
                t.link_count()
            );
            Ok(())
        }
        TopoCmd::Tables { file, numbering } => {
            let t = load_json(&file)?;
            let num = numbering.numbering()?;
            print!("{}", tables_text(&t, &num)?);
            Ok(())
        }
    }
}

fn obtain_flows(
    t: &Topology,
    demands: &Option<PathBuf>,
    cfg: &DemandConfig,
) -> Result<Vec<Flow>, CliError> {
    match demands {
        Some(path) => load_demands(path, t),
        None => generate_demands(t, cfg).map_err(CliError::input),
    }
}

fn run(args: RunArgs) -> Result<(), CliError> {
    let t = load_json(&args.topology)?;
    let flows = obtain_flows(&t, &args.demands, &args.demand.config())?;
    let num = args.numbering.numbering()?;
    let opts = AssignOptions {
        max_cycles: args.max_cycles,
    };
    let outcome = execute_run(&t, &flows, &opts, &args.mode.modes(), &num)?;
    let report = &outcome.report;

    let dir = &args.out_dir;
    let write = |name: &str, bytes: &[u8]| -> Result<PathBuf, CliError> {
        let path = dir.join(name);
        atomic_write(&path, bytes)?;
        Ok(path)
    };
    let mut written = Vec::new();
    let mut report_json =
        serde_json::to_string_pretty(report).expect("report serializes");
    report_json.push('\n');
    written.push(write("report.json", report_json.as_bytes())?);
    written.push(write("demands.jsonl", demands_text(&t, &flows).as_bytes())?);
    written.push(write(
        "flows.csv",
        &csv_bytes(&flows_csv(&t, &flows, &outcome.assignment)),
    )?);
    written.push(write(
        "links.csv",
        &csv_bytes(&links_csv(&t, &outcome.assignment)),
    )?);
    written.push(write(
        "srpaths.csv",
        &csv_bytes(&srpaths_csv(&t, &num, &outcome)),
    )?);

    println!(
        "topology: {} nodes, {} links",
        report.topology.nodes, report.topology.links
    );
    println!(
        "demand: {} flows, {} accepted, {} rejected (ratio {:.4})",
        report.demand.generated,
        report.demand.accepted,
        report.demand.rejected,
        report.demand.acceptance_ratio
    );
    println!(
        "assignment: {} deviation cycles, max utilization {:.4}",
        report.assignment.deviation_cycles, report.assignment.max_link_utilization
    );
    for (mode, stats) in &report.modes {
        let hist: Vec<String> = stats
            .histogram
            .iter()
            .map(|(len, count)| format!("{len}x{count}"))
            .collect();
        println!(
            "{mode}: {} segments over {} lists ({})",
            stats.total_segments,
            report.demand.accepted,
            hist.join(" ")
        );
    }
    println!(
        "timing: flow assignment {:.1} ms, segment compilation {:.1} ms",
        report.te_ms, report.sr_ms
    );
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let t = load_json(&args.topology)?;
    let flows = generate_demands(&t, &args.demand.config()).map_err(CliError::input)?;
    let num = SidNumbering::default();
    let opts = AssignOptions {
        max_cycles: args.max_cycles,
    };
    if args.flows_step == 0 || args.repeats == 0 {
        return Err(CliError::Usage(
            "flows-step and repeats must be positive".into(),
        ));
    }
    let modes = args.mode.modes();
    let mut cuts: Vec<usize> = (1..)
        .map(|k| k * args.flows_step)
        .take_while(|&c| c < flows.len())
        .collect();
    cuts.push(flows.len());

    let mut rows = Vec::new();
    println!("admitted,te_ms,sr_ms,cycles");
    for &cut in &cuts {
        for _ in 0..args.repeats {
            let outcome = execute_run(&t, &flows[..cut], &opts, &modes, &num)?;
            let row = BenchRow {
                admitted: outcome.report.demand.accepted,
                te_ms: outcome.report.te_ms,
                sr_ms: outcome.report.sr_ms,
                cycles: outcome.report.assignment.deviation_cycles,
            };
            println!(
                "{},{:.3},{:.3},{}",
                row.admitted, row.te_ms, row.sr_ms, row.cycles
            );
            rows.push(row);
        }
    }
    let path = args.out_dir.join("bench.csv");
    atomic_write(&path, &csv_bytes(&bench_csv(&rows)))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn node_by_name(t: &Topology, name: &str) -> Result<NodeId, CliError> {
    t.node_by_name(name)
        .ok_or_else(|| CliError::Input(format!("unknown node {name:?}")))
}

fn parse_sids(t: &Topology, spec: &str) -> Result<Vec<Sid>, CliError> {
    let mut sids = Vec::new();
    for token in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let token = token.trim();
        let parts: Vec<&str> = token.split(':').collect();
        let sid = match parts.as_slice() {
            ["node", n] => Sid::Node(node_by_name(t, n)?),
            ["dl", n] => Sid::DirectLink(node_by_name(t, n)?),
            ["adj" | "adjg", a, b] => {
                let (a, b) = (node_by_name(t, a)?, node_by_name(t, b)?);
                let link = t.link_between(a, b).ok_or_else(|| {
                    CliError::Input(format!("no link {} -> {}", parts[1], parts[2]))
                })?;
                if parts[0] == "adj" {
                    Sid::AdjLocal(link)
                } else {
                    Sid::AdjGlobal(link)
                }
            }
            _ => {
                return Err(CliError::Input(format!(
                    "bad segment {token:?}; expected node:N, dl:N, adj:SRC:DST or adjg:SRC:DST"
                )))
            }
        };
        sids.push(sid);
    }
    if sids.is_empty() {
        return Err(CliError::Input("empty segment list".into()));
    }
    Ok(sids)
}

fn sid_text(t: &Topology, sid: &Sid) -> String {
    match sid {
        Sid::Node(n) => format!("node:{}", t.node(*n).name),
        Sid::DirectLink(n) => format!("dl:{}", t.node(*n).name),
        Sid::AdjLocal(e) => format!(
            "adj:{}:{}",
            t.node(t.link(*e).src).name,
            t.node(t.link(*e).dst).name
        ),
        Sid::AdjGlobal(e) => format!(
            "adjg:{}:{}",
            t.node(t.link(*e).src).name,
            t.node(t.link(*e).dst).name
        ),
    }
}

fn trace_line(t: &Topology, ev: &TraceEvent) -> String {
    let action = match ev.action {
        TraceAction::Pop => "pop".to_string(),
        TraceAction::Forward(l) => format!(
            "forward:{}->{}",
            t.node(t.link(l).src).name,
            t.node(t.link(l).dst).name
        ),
        TraceAction::Direct(l) => format!(
            "direct:{}->{}",
            t.node(t.link(l).src).name,
            t.node(t.link(l).dst).name
        ),
    };
    format!(
        "{} | {} | {} | {action}",
        ev.branch,
        t.node(ev.node).name,
        sid_text(t, &ev.sid)
    )
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let t = load_json(&args.topology)?;
    let num = args.numbering.numbering()?;
    let source = node_by_name(&t, &args.source)?;
    let srp = SrPath {
        source,
        sids: parse_sids(&t, &args.sids)?,
    };
    let rv = RoutingView::build(&t);
    let tables = ForwardingTables::build(&t, &num).map_err(CliError::input)?;
    let (routes, trace) = simulate_traced(&t, &rv, &tables, &srp)
        .map_err(|e| CliError::Input(format!("simulation failed: {e}")))?;
    if args.trace {
        for ev in &trace {
            println!("{}", trace_line(&t, ev));
        }
    }
    println!("routes: {}", routes.len());
    for route in &routes {
        let mut names = vec![t.node(source).name.clone()];
        for &l in route {
            names.push(t.node(t.link(l).dst).name.clone());
        }
        println!("  {}", names.join(","));
    }
    println!("deterministic: {}", routes.len() == 1);
    if let Some(path_spec) = &args.path {
        let mut nodes = Vec::new();
        for name in path_spec.split(',') {
            nodes.push(node_by_name(&t, name.trim())?);
        }
        let p = HopPath::new(nodes).map_err(|e| CliError::Input(format!("bad path: {e:?}")))?;
        p.validate_on(&t)
            .map_err(|e| CliError::Input(format!("bad path: {e:?}")))?;
        let want = p.link_ids(&t).expect("validated path");
        let congruent = routes.len() == 1 && routes[0] == want;
        println!("congruent: {congruent}");
        if !congruent {
            return Err(CliError::Verify(format!(
                "segment list does not realize {}",
                path_text(&t, &p)
            )));
        }
    }
    Ok(())
}

