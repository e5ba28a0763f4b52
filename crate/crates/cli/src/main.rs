use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use tqmine_api::{rule_options, rules_json, AppState, Minconf};
use tqmine_core::{
    format_fingerprint, format_rules, mine_patterns, mine_rules_for, node_name, parse_query,
    DataGraph, Error, MineOptions, MiningReport, Outcome, PatternStore, Tree,
};

/// Copy of the mined graph kept next to the store, used by `rules`.
const GRAPH_FILE: &str = "graph.edges";
const REPORT_FILE: &str = "report.txt";

#[derive(Parser)]
#[command(
    name = "tqmine",
    version,
    about = "Frequent tree queries and association rules in a directed graph"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine every frequent tree pattern into a store directory.
    Mine {
        /// Edge list, one `src dst` pair per line.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        minsup: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        max_nodes: u64,
        #[arg(long)]
        out: PathBuf,
        /// Only mine this tree shape, as a level sequence like `0,1,1`. Repeatable.
        #[arg(long = "tree")]
        trees: Vec<String>,
        /// Evaluate candidates on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Derive confident rules for a left-hand-side query.
    Rules {
        #[arg(long)]
        store: PathBuf,
        /// File holding the lhs query.
        #[arg(long)]
        lhs: PathBuf,
        /// `0.3` or `30%`.
        #[arg(long)]
        minconf: String,
        #[arg(long)]
        out: PathBuf,
        /// Graph the store was mined from; defaults to the copy inside the store.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Equivalence::Signature)]
        equivalence: Equivalence,
        /// Skip rhs patterns with more nodes than this.
        #[arg(long)]
        rhs_max_nodes: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Serve the HTTP API over a store.
    Serve {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Equivalence {
    Off,
    Signature,
    Full,
}

impl Equivalence {
    fn name(self) -> &'static str {
        match self {
            Equivalence::Off => "off",
            Equivalence::Signature => "signature",
            Equivalence::Full => "full",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mine {
            graph,
            minsup,
            max_nodes,
            out,
            trees,
            sequential,
        } => cmd_mine(&graph, minsup, max_nodes as usize, &out, &trees, sequential),
        Command::Rules {
            store,
            lhs,
            minconf,
            out,
            graph,
            equivalence,
            rhs_max_nodes,
            format,
        } => cmd_rules(
            &store,
            &lhs,
            &minconf,
            &out,
            graph.as_deref(),
            equivalence,
            rhs_max_nodes,
            format,
        ),
        Command::Serve {
            store,
            graph,
            port,
            host,
        } => cmd_serve(&store, &graph, &host, port),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn summary(value: serde_json::Value) {
    println!("{value}");
}

fn cmd_mine(
    graph_path: &Path,
    minsup: u64,
    max_nodes: usize,
    out: &Path,
    trees: &[String],
    sequential: bool,
) -> Result<(), String> {
    let g = DataGraph::load(graph_path).map_err(err)?;
    let mut opts = MineOptions::new(minsup, max_nodes);
    opts.parallel = !sequential;
    if !trees.is_empty() {
        let mut shapes = Vec::new();
        for t in trees {
            let tree: Tree = t.parse().map_err(|e: Error| format!("--tree {t}: {e}"))?;
            shapes.push(tree.canonical());
        }
        opts.trees = Some(shapes);
    }
    let start = Instant::now();
    let (store, report) = mine_patterns(&g, &opts).map_err(err)?;
    let mine_ms = start.elapsed().as_secs_f64() * 1e3;
    store.save(out, &g).map_err(err)?;
    write_file(&out.join(GRAPH_FILE), &g.to_edge_list())?;
    let text = report_text(&g, &store, &report);
    write_file(&out.join(REPORT_FILE), &text)?;

    let c = report.counts();
    println!(
        "graph {}: {} nodes, {} edges",
        graph_path.display(),
        g.node_count(),
        g.edge_count()
    );
    println!(
        "{} candidates: {} evaluated ({} frequent), {} pruned, {} redundant, {} non-canonical",
        c.candidates, c.evaluated, c.frequent, c.pruned, c.redundant, c.noncanonical
    );
    println!("{} tables written to {}", store.len(), out.display());
    summary(json!({
        "command": "mine",
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "minsup": minsup,
        "max_nodes": max_nodes,
        "candidates": c.candidates,
        "evaluated": c.evaluated,
        "frequent": c.frequent,
        "pruned": c.pruned,
        "redundant": c.redundant,
        "noncanonical": c.noncanonical,
        "patterns": store.len(),
        "mine_ms": mine_ms,
    }));
    Ok(())
}

fn names(ids: &[usize]) -> String {
    if ids.is_empty() {
        return "∅".into();
    }
    let v: Vec<String> = ids.iter().map(|&i| node_name(i)).collect();
    format!("{{{}}}", v.join(","))
}

fn report_text(g: &DataGraph, store: &PatternStore, report: &MiningReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "graph {} ({} nodes, {} edges), minsup {}, max nodes {}",
        format_fingerprint(g.fingerprint()),
        g.node_count(),
        g.edge_count(),
        store.minsup,
        store.max_nodes
    );
    let mut current = None;
    for e in &report.entries {
        if current != Some((&e.tree, e.level)) {
            current = Some((&e.tree, e.level));
            let _ = writeln!(s, "\ntree {} level {}", e.tree, e.level);
        }
        let outcome = match e.outcome {
            Outcome::Evaluated { rows: 0 } => "infrequent".to_string(),
            Outcome::Evaluated { rows } => format!("frequent, {rows} rows"),
            Outcome::PrunedInfrequentParent => "pruned".to_string(),
            Outcome::DismissedRedundant => "redundant".to_string(),
            Outcome::DismissedNoncanonical => "non-canonical".to_string(),
        };
        let _ = writeln!(s, "  ({},{})  {outcome}", names(&e.pi), names(&e.sigma));
    }
    if !report.completed {
        s.push_str("\nstopped early\n");
    }
    s
}

#[allow(clippy::too_many_arguments)]
fn cmd_rules(
    store_dir: &Path,
    lhs_path: &Path,
    minconf: &str,
    out: &Path,
    graph: Option<&Path>,
    equivalence: Equivalence,
    rhs_max_nodes: Option<usize>,
    format: Format,
) -> Result<(), String> {
    let graph_path = graph
        .map(Path::to_path_buf)
        .unwrap_or_else(|| store_dir.join(GRAPH_FILE));
    let g = DataGraph::load(&graph_path).map_err(err)?;
    let store = PatternStore::load(store_dir, &g).map_err(err)?;
    let text = fs::read_to_string(lhs_path).map_err(|e| format!("{}: {e}", lhs_path.display()))?;
    let lhs = parse_query(&text).map_err(|e| format!("{}: {e}", lhs_path.display()))?;
    let opts = rule_options(
        &Minconf::Text(minconf.to_string()),
        Some(equivalence.name()),
        rhs_max_nodes,
    )
    .map_err(err)?;

    let start = Instant::now();
    let rules = mine_rules_for(&store, &g, &lhs, &opts).map_err(err)?;
    let rules_ms = start.elapsed().as_secs_f64() * 1e3;
    let rendered = format_rules(&rules, &g);
    let file_text = match format {
        Format::Text => rendered.clone(),
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&rules_json(&rules, &g)).expect("rules serialize");
            s.push('\n');
            s
        }
    };
    write_file(out, &file_text)?;

    let rows: usize = rules.iter().map(|r| r.rows.len()).sum();
    print!("{rendered}");
    if !rendered.is_empty() && !rendered.ends_with('\n') {
        println!();
    }
    println!(
        "{} rules, {rows} rows written to {}",
        rules.len(),
        out.display()
    );
    summary(json!({
        "command": "rules",
        "rules": rules.len(),
        "rows": rows,
        "minconf": minconf,
        "equivalence": equivalence.name(),
        "rules_ms": rules_ms,
    }));
    Ok(())
}

fn cmd_serve(store_dir: &Path, graph: &Path, host: &str, port: u16) -> Result<(), String> {
    let state = AppState::load(store_dir, graph).map_err(err)?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| format!("cannot listen on {host}:{port}: {e}"))?;
        let addr = listener.local_addr().map_err(|e| e.to_string())?;
        println!("serving {} patterns on http://{addr}", state.store().len());
        summary(json!({
            "command": "serve",
            "addr": addr.to_string(),
            "patterns": state.store().len(),
        }));
        let _ = std::io::stdout().flush();
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        tqmine_api::serve(listener, state, shutdown)
            .await
            .map_err(|e| e.to_string())
    })
}
