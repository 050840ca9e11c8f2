//! Import manifests: which CSV shards hold which node and edge types.
//!
//! A manifest is a JSON document. Relative paths resolve against the
//! manifest's own directory.
//!
//! ```json
//! {
//!   "nodes": [
//!     { "label": "Paper", "files": ["papers.csv"], "id_property": "paper_id:string",
//!       "columns": ["title:string", "year:int"] }
//!   ],
//!   "edges": [
//!     { "label": "CITES", "files": ["cites.csv"], "columns": [] }
//!   ],
//!   "index_script": "indexes.cypher"
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use litgraph_core::{EdgeLabel, NodeLabel};
use serde::{Deserialize, Serialize};

use crate::error::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    String,
    Int,
    Float,
    Boolean,
}

impl FromStr for ColumnType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "string" => Ok(ColumnType::String),
            "int" => Ok(ColumnType::Int),
            "float" => Ok(ColumnType::Float),
            "boolean" => Ok(ColumnType::Boolean),
            other => Err(format!("unknown column type `{other}`")),
        }
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnType::String => "string",
            ColumnType::Int => "int",
            ColumnType::Float => "float",
            ColumnType::Boolean => "boolean",
        })
    }
}

/// A typed property column, written `name:type` in manifests and headers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub ty: ColumnType,
}

impl ColumnSpec {
    pub fn header(&self) -> String {
        format!("{}:{}", self.name, self.ty)
    }
}

impl FromStr for ColumnSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, ty) = s.split_once(':').ok_or_else(|| format!("column `{s}` lacks a `:type` suffix"))?;
        if name.is_empty() {
            return Err(format!("column `{s}` has an empty name"));
        }
        Ok(ColumnSpec { name: name.to_owned(), ty: ty.parse()? })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSection {
    pub label: NodeLabel,
    pub files: Vec<PathBuf>,
    /// Header of the column holding the external id.
    pub id_column: String,
    /// Property that also receives the external id, if any.
    pub id_property: Option<ColumnSpec>,
    pub columns: Vec<ColumnSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSection {
    pub label: EdgeLabel,
    pub files: Vec<PathBuf>,
    pub src_column: String,
    pub dst_column: String,
    pub columns: Vec<ColumnSpec>,
}

/// A validated manifest with absolute shard paths.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ImportManifest {
    pub nodes: Vec<NodeSection>,
    pub edges: Vec<EdgeSection>,
    pub index_script: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    nodes: Vec<RawNodeSection>,
    #[serde(default)]
    edges: Vec<RawEdgeSection>,
    #[serde(default)]
    index_script: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNodeSection {
    label: String,
    #[serde(default)]
    files: Vec<PathBuf>,
    #[serde(default = "default_id")]
    id_column: String,
    #[serde(default)]
    id_property: Option<String>,
    #[serde(default)]
    columns: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdgeSection {
    label: String,
    #[serde(default)]
    files: Vec<PathBuf>,
    #[serde(default = "default_src")]
    src_column: String,
    #[serde(default = "default_dst")]
    dst_column: String,
    #[serde(default)]
    columns: Vec<String>,
}

fn default_id() -> String {
    "id".into()
}

fn default_src() -> String {
    "src".into()
}

fn default_dst() -> String {
    "dst".into()
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<ImportManifest, IngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_manifest(&text, base).map_err(|reason| IngestError::ManifestInvalid { path: path.to_owned(), reason })
}

/// Parses and validates manifest JSON; relative paths resolve against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<ImportManifest, String> {
    let raw: RawManifest = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
    let columns = |cols: Vec<String>| -> Result<Vec<ColumnSpec>, String> {
        cols.iter().map(|c| c.parse::<ColumnSpec>()).collect()
    };

    let mut manifest = ImportManifest { index_script: raw.index_script.map(resolve), ..Default::default() };
    for s in raw.nodes {
        let label: NodeLabel = s.label.parse().map_err(|e| format!("node section: {e}"))?;
        if manifest.nodes.iter().any(|n| n.label == label) {
            return Err(format!("node label {label} is declared twice"));
        }
        let section = NodeSection {
            label,
            files: s.files.into_iter().map(resolve).collect(),
            id_property: s.id_property.map(|p| p.parse()).transpose()?,
            columns: columns(s.columns)?,
            id_column: s.id_column,
        };
        check_unique_headers(&section.id_column, &[], &section.columns, &label.to_string())?;
        if let Some(id) = &section.id_property {
            if section.columns.iter().any(|c| c.name == id.name) {
                return Err(format!("section {label} stores its id in `{}`, which is also a column", id.name));
            }
        }
        manifest.nodes.push(section);
    }
    for s in raw.edges {
        let label: EdgeLabel = s.label.parse().map_err(|e| format!("edge section: {e}"))?;
        if manifest.edges.iter().any(|n| n.label == label) {
            return Err(format!("edge label {label} is declared twice"));
        }
        let (src, dst) = label.signature();
        for end in [src, dst] {
            if !manifest.nodes.iter().any(|n| n.label == end) {
                return Err(format!("edge label {label} refers to {end} ids, but no {end} section is declared"));
            }
        }
        let section = EdgeSection {
            label,
            files: s.files.into_iter().map(resolve).collect(),
            columns: columns(s.columns)?,
            src_column: s.src_column,
            dst_column: s.dst_column,
        };
        check_unique_headers(&section.src_column, &[&section.dst_column], &section.columns, &label.to_string())?;
        manifest.edges.push(section);
    }
    Ok(manifest)
}

fn check_unique_headers(first: &str, more: &[&str], cols: &[ColumnSpec], section: &str) -> Result<(), String> {
    let mut seen = std::collections::HashSet::new();
    let names = std::iter::once(first).chain(more.iter().copied()).chain(cols.iter().map(|c| c.name.as_str()));
    for name in names {
        if !seen.insert(name) {
            return Err(format!("section {section} declares column `{name}` twice"));
        }
    }
    Ok(())
}

impl NodeSection {
    /// Header fields a shard of this section must carry, in any order.
    pub fn expected_header(&self) -> Vec<String> {
        std::iter::once(self.id_column.clone()).chain(self.columns.iter().map(ColumnSpec::header)).collect()
    }
}

impl EdgeSection {
    pub fn expected_header(&self) -> Vec<String> {
        [self.src_column.clone(), self.dst_column.clone()]
            .into_iter()
            .chain(self.columns.iter().map(ColumnSpec::header))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_is_valid() {
        let m = parse_manifest("{}", Path::new("/x")).unwrap();
        assert_eq!(m, ImportManifest::default());
    }

    #[test]
    fn rejects_unknown_labels_and_types() {
        let bad_label = r#"{"nodes": [{"label": "Journal", "files": []}]}"#;
        assert!(parse_manifest(bad_label, Path::new(".")).unwrap_err().contains("Journal"));
        let bad_type = r#"{"nodes": [{"label": "Paper", "columns": ["year:date"]}]}"#;
        assert!(parse_manifest(bad_type, Path::new(".")).unwrap_err().contains("date"));
        let untyped = r#"{"nodes": [{"label": "Paper", "columns": ["year"]}]}"#;
        assert!(parse_manifest(untyped, Path::new(".")).is_err());
    }

    #[test]
    fn edges_need_their_endpoint_sections() {
        let m = r#"{"nodes": [{"label": "Paper"}], "edges": [{"label": "AUTHORS"}]}"#;
        assert!(parse_manifest(m, Path::new(".")).unwrap_err().contains("Author"));
        let ok = r#"{"nodes": [{"label": "Paper"}], "edges": [{"label": "CITES"}]}"#;
        assert!(parse_manifest(ok, Path::new(".")).is_ok());
    }

    #[test]
    fn relative_paths_resolve_against_the_manifest() {
        let m = r#"{"nodes": [{"label": "Paper", "files": ["a.csv", "/abs/b.csv"]}], "index_script": "i.cypher"}"#;
        let m = parse_manifest(m, Path::new("/data")).unwrap();
        assert_eq!(m.nodes[0].files, vec![PathBuf::from("/data/a.csv"), PathBuf::from("/abs/b.csv")]);
        assert_eq!(m.index_script, Some(PathBuf::from("/data/i.cypher")));
    }

    #[test]
    fn duplicate_columns_are_rejected() {
        let m = r#"{"nodes": [{"label": "Paper", "columns": ["year:int", "year:string"]}]}"#;
        assert!(parse_manifest(m, Path::new(".")).is_err());
    }
}
