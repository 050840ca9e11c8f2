use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use litgraph_core::{NodeId, PropertyGraph};
use litgraph_cypher::{execute, ExecOptions, QueryError};
use litgraph_ingest::{import_bulk, load_manifest, write_synthetic, ImportReport, SyntheticSpec};
use litgraph_metrics::AuthorRef;
use litgraph_resolver::{find_paper, ExternalId, ResolutionCache, Resolver, ResolverConfig};
use litgraph_service::{bundled_examples, load_examples, AppState, BuildInfo, ServiceConfig};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "litgraph", version, about = "Scholarly knowledge graph: import, query and serve")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Import CSV shards and print the import report.
    Build {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = default_parallelism())]
        parallelism: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out_report: Option<PathBuf>,
    },
    /// Serve the HTTP query API.
    Serve {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = 10_000)]
        max_rows: usize,
        #[arg(long, default_value_t = 30_000)]
        timeout_ms: u64,
        /// Examples file; the bundled examples are used when omitted.
        #[arg(long)]
        examples: Option<PathBuf>,
    },
    /// Run one statement and print the result.
    Query {
        #[command(flatten)]
        graph: GraphArgs,
        statement: String,
        /// `name=value`; values that parse as integers are integers.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, Value)>,
        #[arg(long)]
        max_rows: Option<usize>,
        #[arg(long)]
        timeout_ms: Option<u64>,
        /// Plan every lookup as a label scan.
        #[arg(long)]
        no_indexes: bool,
        #[arg(long)]
        json: bool,
    },
    /// Citation metrics.
    Metrics {
        #[command(subcommand)]
        metric: Metric,
    },
    /// Authors with the most papers mentioning an entity.
    Experts {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        entity: String,
        /// Only papers with a year strictly greater than this.
        #[arg(long)]
        since: Option<i64>,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Shortest co-authorship path between two authors.
    Path {
        #[command(flatten)]
        graph: GraphArgs,
        /// An author_id, or "First Last".
        #[arg(long)]
        from_author: String,
        #[arg(long)]
        to_author: String,
        #[arg(long, default_value_t = litgraph_metrics::DEFAULT_MAX_AUTHOR_EDGES)]
        max_hops: u32,
        #[arg(long)]
        json: bool,
    },
    /// Map a DOI or arXiv id to a paper id.
    Resolve {
        /// `10.1038/nrn3241`, `doi:…` or `arxiv:…`.
        id: String,
        /// Also look the paper up in this graph.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value = "litgraph-resolver-cache.tsv")]
        cache: PathBuf,
        #[arg(long)]
        offline: bool,
        /// Defaults to $LITGRAPH_RESOLVER_BASE, then the public API.
        #[arg(long)]
        base_url: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Write a seeded synthetic corpus (100K nodes, 1M edges at scale 1).
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        shards: usize,
    },
}

#[derive(Subcommand)]
enum Metric {
    HIndex(AuthorMetric),
    I10(AuthorMetric),
    Cd {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        paper_id: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct AuthorMetric {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, conflicts_with = "author", required_unless_present = "author")]
    author_id: Option<i64>,
    /// "First Last"
    #[arg(long)]
    author: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GraphArgs {
    /// Import directory holding manifest.json, or a manifest file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = default_parallelism())]
    parallelism: usize,
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn parse_param(s: &str) -> Result<(String, Value), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let value = value.parse::<i64>().map_or_else(|_| json!(value), |i| json!(i));
    Ok((name.to_owned(), value))
}

fn manifest_path(graph: &Path) -> PathBuf {
    if graph.is_dir() {
        graph.join("manifest.json")
    } else {
        graph.to_owned()
    }
}

fn load_graph(path: &Path, parallelism: usize) -> Result<(PropertyGraph, ImportReport)> {
    let manifest_path = manifest_path(path);
    let manifest = load_manifest(&manifest_path)?;
    let (graph, report) = import_bulk(&manifest, parallelism)?;
    tracing::info!(
        nodes = graph.node_count(),
        edges = graph.edge_count(),
        rejected = report.rejected_rows,
        "imported {}",
        manifest_path.display()
    );
    Ok((graph, report))
}

impl GraphArgs {
    fn load(&self) -> Result<PropertyGraph> {
        Ok(load_graph(&self.graph, self.parallelism)?.0)
    }
}

fn author_ref(s: &str) -> Result<AuthorRef> {
    let s = s.trim();
    if let Ok(id) = s.parse::<i64>() {
        return Ok(AuthorRef::Id(id));
    }
    match s.split_once(char::is_whitespace) {
        Some((first, last)) => Ok(AuthorRef::name(first, last.trim())),
        None => bail!("author `{s}` must be an author_id or \"First Last\""),
    }
}

fn print_json(v: &Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn print_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", header.join("\t"))?;
    for row in rows {
        writeln!(out, "{}", row.join("\t"))?;
    }
    Ok(())
}

fn node_json(g: &PropertyGraph, n: NodeId) -> Value {
    litgraph_cypher::value::value_json(&litgraph_cypher::Value::Node(n), g)
}

fn node_text(g: &PropertyGraph, n: NodeId) -> String {
    litgraph_cypher::value::Display { value: &litgraph_cypher::Value::Node(n), graph: g }.to_string()
}

fn build(manifest: &Path, parallelism: usize, out_report: Option<&Path>) -> Result<()> {
    let manifest = load_manifest(manifest)?;
    let (_, report) = import_bulk(&manifest, parallelism)?;
    for (file, r) in report.rejections() {
        eprintln!(
            "{}:{}: {} ({})",
            file.file.display(),
            r.line,
            serde_json::to_value(r.reason)?.as_str().unwrap_or(""),
            r.detail
        );
    }
    eprintln!(
        "{} rows read, {} accepted, {} rejected; {} nodes, {} edges",
        report.total_rows,
        report.accepted_rows,
        report.rejected_rows,
        report.counts.total_nodes(),
        report.counts.total_edges()
    );
    let text = serde_json::to_string_pretty(&report)?;
    match out_report {
        Some(path) => std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn serve(graph: GraphArgs, host: String, port: u16, config: ServiceConfig, examples: Option<PathBuf>) -> Result<()> {
    let examples = match examples {
        Some(path) => load_examples(&path)?,
        None => bundled_examples(),
    };
    let state = AppState::new(config, examples);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind((host.as_str(), port)).await?;
        tracing::info!("listening on http://{}", listener.local_addr()?);
        let loader = Arc::clone(&state);
        let source = manifest_path(&graph.graph).display().to_string();
        // the API answers 503 until the import finishes
        let load = tokio::task::spawn_blocking(move || -> Result<()> {
            let (g, report) = load_graph(&graph.graph, graph.parallelism)?;
            loader.install(g, BuildInfo { source: Some(source), built_at_unix: Some(report.run.finished_at_unix) });
            Ok(())
        });
        let server = tokio::spawn(litgraph_service::serve(listener, state, async {
            let _ = tokio::signal::ctrl_c().await;
        }));
        load.await??;
        server.await??;
        Ok(())
    })
}

fn query(
    graph: &PropertyGraph,
    statement: &str,
    params: Vec<(String, Value)>,
    opts: ExecOptions,
    as_json: bool,
) -> Result<()> {
    let params: BTreeMap<String, Value> = params.into_iter().collect();
    let text = litgraph_service::substitute(statement, &params)?.text;
    let (table, truncated) = match execute(&text, graph, opts) {
        Ok(t) => (t, false),
        Err(QueryError::RowLimitExceeded(partial)) => (*partial, true),
        Err(e) => return Err(e.into()),
    };
    for w in &table.warnings {
        eprintln!("warning: {w}");
    }
    if truncated {
        eprintln!("warning: output truncated at {} rows", table.rows.len());
    }
    if as_json {
        let mut v = table.to_json(graph);
        v["truncated"] = json!(truncated);
        print_json(&v)
    } else {
        print!("{}", table.to_text(graph));
        Ok(())
    }
}

fn author_metric(
    m: AuthorMetric,
    name: &str,
    f: fn(&PropertyGraph, &AuthorRef) -> Result<usize, litgraph_metrics::MetricsError>,
) -> Result<()> {
    let g = m.graph.load()?;
    let author = match (m.author_id, &m.author) {
        (Some(id), _) => AuthorRef::Id(id),
        (None, Some(name)) => author_ref(name)?,
        (None, None) => bail!("--author-id or --author is required"),
    };
    let node = litgraph_metrics::find_author(&g, &author)?;
    let value = f(&g, &AuthorRef::Node(node))?;
    let counts = litgraph_metrics::author_citation_counts(&g, &AuthorRef::Node(node))?;
    if m.json {
        print_json(&json!({ "author": node_json(&g, node), name: value, "citation_counts": counts }))
    } else {
        print_table(&["author", name], [vec![node_text(&g, node), value.to_string()]])
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build { manifest, parallelism, out_report } => build(&manifest, parallelism, out_report.as_deref()),
        Command::Serve { graph, host, port, max_rows, timeout_ms, examples } => {
            let config = ServiceConfig { max_rows, timeout: Duration::from_millis(timeout_ms) };
            serve(graph, host, port, config, examples)
        }
        Command::Query { graph, statement, params, max_rows, timeout_ms, no_indexes, json } => {
            let g = graph.load()?;
            let opts = ExecOptions {
                max_rows: max_rows.unwrap_or(usize::MAX),
                timeout: timeout_ms.map(Duration::from_millis),
                use_indexes: !no_indexes,
            };
            query(&g, &statement, params, opts, json)
        }
        Command::Metrics { metric: Metric::HIndex(m) } => author_metric(m, "h_index", litgraph_metrics::h_index),
        Command::Metrics { metric: Metric::I10(m) } => author_metric(m, "i10_index", litgraph_metrics::i10_index),
        Command::Metrics { metric: Metric::Cd { graph, paper_id, json } } => {
            let g = graph.load()?;
            let paper = litgraph_metrics::find_paper(&g, &paper_id)?;
            let (sum, size) = litgraph_metrics::cd_index_terms(&g, paper)?;
            let cd = litgraph_metrics::cd_index(&g, paper)?;
            if json {
                print_json(&json!({ "paper_id": paper_id, "cd_index": cd, "citing_set_size": size, "numerator": sum }))
            } else {
                print_table(
                    &["paper_id", "cd_index", "citing_set_size"],
                    [vec![paper_id, cd.to_string(), size.to_string()]],
                )
            }
        }
        Command::Experts { graph, entity, since, limit, json } => {
            let g = graph.load()?;
            let ranking = litgraph_metrics::find_experts(&g, &entity, since, limit)?;
            if json {
                let rows: Vec<Value> =
                    ranking.iter().map(|(a, n)| json!({ "author": node_json(&g, *a), "papers": n })).collect();
                print_json(&Value::Array(rows))
            } else {
                print_table(&["author", "papers"], ranking.iter().map(|(a, n)| vec![node_text(&g, *a), n.to_string()]))
            }
        }
        Command::Path { graph, from_author, to_author, max_hops, json } => {
            let g = graph.load()?;
            let path = litgraph_metrics::coauthor_shortest_path(
                &g,
                &author_ref(&from_author)?,
                &author_ref(&to_author)?,
                max_hops,
            )?;
            let Some(path) = path else {
                if json {
                    return print_json(&Value::Null);
                }
                bail!("no co-authorship path of at most {max_hops} edges");
            };
            if json {
                let nodes: Vec<Value> = path.nodes().iter().map(|&n| node_json(&g, n)).collect();
                print_json(
                    &json!({ "length": path.len(), "nodes": nodes, "edges": path.edges().iter().map(|e| e.0).collect::<Vec<_>>() }),
                )
            } else {
                print_table(
                    &["step", "node"],
                    path.nodes().iter().enumerate().map(|(i, &n)| vec![i.to_string(), node_text(&g, n)]),
                )
            }
        }
        Command::Resolve { id, graph, cache, offline, base_url, json } => {
            let mut config = ResolverConfig { offline, ..ResolverConfig::from_env() };
            if let Some(base) = base_url {
                config.base_url = base;
            }
            let resolver = Resolver::http(config, ResolutionCache::open(&cache)?);
            let id: ExternalId = id.parse()?;
            let paper_id = resolver.resolve(&id)?;
            let node = match &graph {
                Some(path) => {
                    let (g, _) = load_graph(path, default_parallelism())?;
                    find_paper(&g, &resolver, &id)?.map(|n| (node_json(&g, n), node_text(&g, n)))
                }
                None => None,
            };
            if json {
                print_json(&json!({ "id": id.to_string(), "paper_id": paper_id, "node": node.map(|n| n.0) }))
            } else {
                let mut row = vec![id.to_string(), paper_id];
                if graph.is_some() {
                    row.push(node.map_or_else(|| "-".into(), |n| n.1));
                }
                let header: &[&str] = if graph.is_some() { &["id", "paper_id", "node"] } else { &["id", "paper_id"] };
                print_table(header, [row])
            }
        }
        Command::Generate { out, scale, seed, shards } => {
            let mut spec = SyntheticSpec::scaled(seed, scale);
            spec.shards = shards;
            let manifest = write_synthetic(&out, &spec)?;
            println!("{}", manifest.display());
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    run(Cli::parse())
}
