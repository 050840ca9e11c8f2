//! Seeded synthetic corpora in the import CSV format, for load and index
//! benchmarks.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use litgraph_core::{EdgeLabel, NodeLabel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::IngestError;

/// Per-label sizes of a generated corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub seed: u64,
    /// Files per section.
    pub shards: usize,
    pub nodes: Vec<(NodeLabel, usize)>,
    pub edges: Vec<(EdgeLabel, usize)>,
}

impl SyntheticSpec {
    /// 100,000 nodes and 1,000,000 edges.
    pub fn standard(seed: u64) -> Self {
        use EdgeLabel::*;
        use NodeLabel::*;
        SyntheticSpec {
            seed,
            shards: 4,
            nodes: vec![
                (Paper, 50_000),
                (Author, 30_000),
                (Entity, 15_000),
                (Venue, 2_000),
                (Affiliation, 2_000),
                (Relation, 500),
                (RelationInstance, 500),
            ],
            edges: vec![
                (Cites, 460_000),
                (Authors, 250_000),
                (Mentions, 200_000),
                (AppearsIn, 50_000),
                (AffiliatedWith, 30_000),
                (MentionsRelation, 8_500),
                (WithEntity, 1_000),
                (WithRelationship, 500),
            ],
        }
    }

    /// Every count multiplied by `factor`, keeping at least one node per
    /// label.
    pub fn scaled(seed: u64, factor: f64) -> Self {
        let mut s = Self::standard(seed);
        for (_, n) in &mut s.nodes {
            *n = ((*n as f64 * factor).round() as usize).max(1);
        }
        for (_, n) in &mut s.edges {
            *n = (*n as f64 * factor).round() as usize;
        }
        s
    }

    pub fn node_count(&self, label: NodeLabel) -> usize {
        self.nodes.iter().find(|(l, _)| *l == label).map_or(0, |(_, n)| *n)
    }

    pub fn edge_count(&self, label: EdgeLabel) -> usize {
        self.edges.iter().find(|(l, _)| *l == label).map_or(0, |(_, n)| *n)
    }
}

/// External id of the `i`th generated paper: 40 lowercase hex digits.
pub fn synthetic_paper_id(seed: u64, i: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let hi: u128 = rng.gen();
    let lo: u32 = rng.gen();
    format!("{:032x}{:08x}", hi, lo)
}

fn external_id(label: NodeLabel, seed: u64, i: usize) -> String {
    match label {
        NodeLabel::Paper => synthetic_paper_id(seed, i),
        other => format!("{}{i}", other.as_str().to_ascii_lowercase()),
    }
}

const WORDS: &[&str] = &[
    "neural",
    "graph",
    "learning",
    "semantic",
    "parsing",
    "protein",
    "cell",
    "network",
    "inference",
    "entity",
    "relation",
    "extraction",
    "clinical",
    "model",
    "deep",
    "citation",
    "query",
    "language",
    "vision",
    "gene",
];
const FIRST: &[&str] = &["Ada", "Alan", "Grace", "Luke", "Regina", "Noah", "Mira", "Omar", "Yuki", "Lena"];
const LAST: &[&str] = &["Ng", "Smith", "Garcia", "Chen", "Okafor", "Ivanova", "Kim", "Rossi", "Silva", "Patel"];

fn words(rng: &mut ChaCha8Rng, n: usize) -> String {
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

struct Section {
    header: Vec<&'static str>,
    columns: Vec<&'static str>,
}

fn node_section(label: NodeLabel) -> Section {
    let columns = match label {
        NodeLabel::Paper => vec!["title:string", "year:int"],
        NodeLabel::Author => vec!["author_id:int", "first:string", "last:string"],
        NodeLabel::Entity | NodeLabel::Relation => vec!["name:string"],
        NodeLabel::Venue | NodeLabel::Affiliation => vec!["text:string"],
        NodeLabel::RelationInstance => vec![],
    };
    Section { header: std::iter::once("id").chain(columns.iter().copied()).collect(), columns }
}

fn edge_section(label: EdgeLabel) -> Section {
    let columns = if label == EdgeLabel::WithEntity { vec!["position:int"] } else { vec![] };
    Section { header: ["src", "dst"].into_iter().chain(columns.iter().copied()).collect(), columns }
}

fn node_row(label: NodeLabel, i: usize, seed: u64, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut row = vec![external_id(label, seed, i)];
    match label {
        NodeLabel::Paper => {
            let n = rng.gen_range(3..8);
            row.push(format!("{} {i}", words(rng, n)));
            row.push(rng.gen_range(1970..=2019).to_string());
        }
        NodeLabel::Author => {
            row.push((1_000_000 + i).to_string());
            row.push(FIRST.choose(rng).unwrap().to_string());
            row.push(format!("{}{}", LAST.choose(rng).unwrap(), i));
        }
        NodeLabel::Entity | NodeLabel::Relation => {
            let n = rng.gen_range(1..4);
            row.push(format!("{} {i}", words(rng, n)));
        }
        NodeLabel::Venue | NodeLabel::Affiliation => row.push(format!("{} {}", words(rng, 2).to_uppercase(), i)),
        NodeLabel::RelationInstance => {}
    }
    row
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> IngestError + '_ {
    move |source| IngestError::Csv { path: path.to_owned(), source }
}

type ShardWriters = (Vec<PathBuf>, Vec<csv::Writer<BufWriter<File>>>);

fn open_shards(dir: &Path, stem: &str, shards: usize, header: &[&str]) -> Result<ShardWriters, IngestError> {
    let mut paths = Vec::new();
    let mut writers = Vec::new();
    for k in 0..shards {
        let path = dir.join(format!("{stem}-{k}.csv"));
        let file = File::create(&path).map_err(|e| IngestError::io(&path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        w.write_record(header).map_err(csv_err(&path))?;
        paths.push(path);
        writers.push(w);
    }
    Ok((paths, writers))
}

fn finish(paths: &[PathBuf], writers: Vec<csv::Writer<BufWriter<File>>>) -> Result<(), IngestError> {
    for (path, mut w) in paths.iter().zip(writers) {
        w.flush().map_err(|e| IngestError::io(path, e))?;
    }
    Ok(())
}

/// Writes shards, an index script and `manifest.json` into `dir` and returns
/// the manifest path. The same spec always produces the same files.
pub fn write_synthetic(dir: &Path, spec: &SyntheticSpec) -> Result<PathBuf, IngestError> {
    std::fs::create_dir_all(dir).map_err(|e| IngestError::io(dir, e))?;
    let shards = spec.shards.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rel = |p: &PathBuf| p.strip_prefix(dir).unwrap_or(p).to_string_lossy().into_owned();

    let mut node_json = Vec::new();
    for &label in &NodeLabel::ALL {
        let section = node_section(label);
        let (paths, mut writers) = open_shards(dir, &format!("nodes-{label}"), shards, &section.header)?;
        for i in 0..spec.node_count(label) {
            let k = i % shards;
            writers[k].write_record(node_row(label, i, spec.seed, &mut rng)).map_err(csv_err(&paths[k]))?;
        }
        finish(&paths, writers)?;
        let mut entry = json!({
            "label": label.as_str(),
            "files": paths.iter().map(rel).collect::<Vec<_>>(),
            "columns": section.columns,
        });
        if label == NodeLabel::Paper {
            entry["id_property"] = json!("paper_id:string");
        }
        node_json.push(entry);
    }

    let mut edge_json = Vec::new();
    for &label in &EdgeLabel::ALL {
        let section = edge_section(label);
        let (src_label, dst_label) = label.signature();
        let (n_src, n_dst) = (spec.node_count(src_label), spec.node_count(dst_label));
        let (paths, mut writers) = open_shards(dir, &format!("edges-{label}"), shards, &section.header)?;
        let total = spec.edge_count(label);
        if n_src > 0 && n_dst > 0 {
            for i in 0..total {
                let (src, dst, extra) = match label {
                    // two entity arguments and one relation per instance
                    EdgeLabel::WithEntity => (i / 2 % n_src, rng.gen_range(0..n_dst), vec![(i % 2).to_string()]),
                    EdgeLabel::WithRelationship => (i % n_src, rng.gen_range(0..n_dst), vec![]),
                    EdgeLabel::Cites if n_src > 1 => {
                        let src = rng.gen_range(0..n_src);
                        let dst = (src + rng.gen_range(1..n_src)) % n_src;
                        (src, dst, vec![])
                    }
                    _ => (rng.gen_range(0..n_src), rng.gen_range(0..n_dst), vec![]),
                };
                let mut row = vec![external_id(src_label, spec.seed, src), external_id(dst_label, spec.seed, dst)];
                row.extend(extra);
                let k = i % shards;
                writers[k].write_record(&row).map_err(csv_err(&paths[k]))?;
            }
        }
        finish(&paths, writers)?;
        edge_json.push(json!({
            "label": label.as_str(),
            "files": paths.iter().map(rel).collect::<Vec<_>>(),
            "columns": section.columns,
        }));
    }

    let script = dir.join("indexes.cypher");
    let lines: String = litgraph_core::schema::DEFAULT_INDEXES
        .iter()
        .map(|(label, prop)| format!("CREATE INDEX ON :{label}({prop})\n"))
        .collect();
    std::fs::write(&script, lines).map_err(|e| IngestError::io(&script, e))?;

    let manifest = dir.join("manifest.json");
    let body = json!({ "nodes": node_json, "edges": edge_json, "index_script": "indexes.cypher" });
    let text = serde_json::to_string_pretty(&body).expect("json value serializes");
    std::fs::write(&manifest, text).map_err(|e| IngestError::io(&manifest, e))?;
    Ok(manifest)
}
