//! Parallel shard parsing followed by a sequential, deterministic build.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use litgraph_core::{EdgeLabel, GraphCounts, NodeId, NodeLabel, PropertyGraph, PropertyMap};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::IngestError;
use crate::manifest::ImportManifest;
use crate::script::run_index_script;
use crate::shard::{import_shard, RejectReason, Rejection, SectionSpec, StagedShard};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileReport {
    pub file: PathBuf,
    /// Label of the section the file belongs to.
    pub section: String,
    pub rows: u64,
    pub accepted: u64,
    pub rejected: Vec<Rejection>,
}

/// Wall-clock details that differ between otherwise identical runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunInfo {
    pub parallelism: usize,
    pub parse_ms: u64,
    pub merge_ms: u64,
    pub build_ms: u64,
    pub index_ms: u64,
    pub finished_at_unix: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    pub counts: GraphCounts,
    pub files: Vec<FileReport>,
    pub total_rows: u64,
    pub accepted_rows: u64,
    pub rejected_rows: u64,
    pub run: RunInfo,
}

impl ImportReport {
    /// Equality ignoring timings.
    pub fn same_outcome(&self, other: &ImportReport) -> bool {
        self.counts == other.counts
            && self.files == other.files
            && self.total_rows == other.total_rows
            && self.accepted_rows == other.accepted_rows
            && self.rejected_rows == other.rejected_rows
    }

    pub fn rejections(&self) -> impl Iterator<Item = (&FileReport, &Rejection)> {
        self.files.iter().flat_map(|f| f.rejected.iter().map(move |r| (f, r)))
    }
}

fn millis(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

/// Imports every shard the manifest lists and returns the sealed graph.
///
/// Shards are parsed on `parallelism` worker threads; nodes and edges are
/// then inserted in manifest order (sections, then files, then rows), so the
/// resulting graph does not depend on `parallelism`. When an id repeats
/// within a label the first row wins.
pub fn import_bulk(
    manifest: &ImportManifest,
    parallelism: usize,
) -> Result<(PropertyGraph, ImportReport), IngestError> {
    let parallelism = parallelism.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| IngestError::Workers(e.to_string()))?;

    let mut tasks: Vec<(SectionSpec<'_>, &PathBuf)> = Vec::new();
    for s in &manifest.nodes {
        tasks.extend(s.files.iter().map(|f| (SectionSpec::Node(s), f)));
    }
    for s in &manifest.edges {
        tasks.extend(s.files.iter().map(|f| (SectionSpec::Edge(s), f)));
    }

    let started = Instant::now();
    let staged: Vec<StagedShard> =
        pool.install(|| tasks.par_iter().map(|(spec, file)| import_shard(file, *spec)).collect::<Result<_, _>>())?;
    let parse_ms = millis(started);

    // Merge: resolve external ids to the node ids the build will assign.
    let started = Instant::now();
    let mut nodes: Vec<(NodeLabel, PropertyMap)> = Vec::new();
    let mut edges: Vec<(NodeId, EdgeLabel, NodeId, PropertyMap)> = Vec::new();
    let mut ids: HashMap<NodeLabel, HashMap<String, NodeId>> = HashMap::new();
    let mut files = Vec::with_capacity(staged.len());
    for ((spec, _), shard) in tasks.iter().zip(staged) {
        let StagedShard { file, rows, mut rejected, total_rows } = shard;
        let mut accepted = 0;
        match spec {
            SectionSpec::Node(s) => {
                let map = ids.entry(s.label).or_default();
                for row in rows {
                    if map.contains_key(&row.key) {
                        rejected.push(Rejection {
                            line: row.line,
                            reason: RejectReason::DuplicateId,
                            detail: format!("{} id `{}` already imported", s.label, row.key),
                        });
                        continue;
                    }
                    map.insert(row.key, NodeId(nodes.len() as u64));
                    nodes.push((s.label, row.props));
                    accepted += 1;
                }
            }
            SectionSpec::Edge(s) => {
                let (src_label, dst_label) = s.label.signature();
                for row in rows {
                    let dst_key = row.dst.as_deref().unwrap_or_default();
                    let src = ids.get(&src_label).and_then(|m| m.get(&row.key)).copied();
                    let dst = ids.get(&dst_label).and_then(|m| m.get(dst_key)).copied();
                    match (src, dst) {
                        (Some(src), Some(dst)) => {
                            edges.push((src, s.label, dst, row.props));
                            accepted += 1;
                        }
                        (None, _) => rejected.push(dangling(row.line, src_label, &row.key)),
                        (_, None) => rejected.push(dangling(row.line, dst_label, dst_key)),
                    }
                }
            }
        }
        rejected.sort_by_key(|r| r.line);
        files.push(FileReport { file, section: spec.name(), rows: total_rows, accepted, rejected });
    }
    drop(ids);
    let merge_ms = millis(started);

    let started = Instant::now();
    let mut graph = PropertyGraph::with_capacity(nodes.len(), edges.len());
    for (label, props) in nodes {
        graph.add_node(label, props)?;
    }
    for (src, label, dst, props) in edges {
        graph.add_edge(src, label, dst, props)?;
    }
    let build_ms = millis(started);

    let started = Instant::now();
    if let Some(script) = &manifest.index_script {
        run_index_script(&mut graph, script)?;
    }
    graph.seal();
    let index_ms = millis(started);

    let total_rows = files.iter().map(|f| f.rows).sum();
    let accepted_rows = files.iter().map(|f| f.accepted).sum();
    let rejected_rows = files.iter().map(|f| f.rejected.len() as u64).sum();
    let finished_at_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let report = ImportReport {
        counts: graph.counts(),
        files,
        total_rows,
        accepted_rows,
        rejected_rows,
        run: RunInfo { parallelism, parse_ms, merge_ms, build_ms, index_ms, finished_at_unix },
    };
    Ok((graph, report))
}

fn dangling(line: u64, label: NodeLabel, key: &str) -> Rejection {
    Rejection { line, reason: RejectReason::DanglingRef, detail: format!("no {label} with id `{key}`") }
}
