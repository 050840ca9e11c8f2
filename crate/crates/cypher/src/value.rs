//! Runtime values and result tables.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use litgraph_core::{EdgeId, NodeId, Path, PropertyGraph, PropertyMap, PropertyValue};
use serde_json::{json, Map, Value as Json};

/// A value bound to a variable or produced by an expression.
#[derive(Debug, Clone)]
pub enum Value {
    Scalar(PropertyValue),
    Node(NodeId),
    Edge(EdgeId),
    Path(Path),
    List(Vec<Value>),
}

impl Value {
    pub const NULL: Value = Value::Scalar(PropertyValue::Null);

    pub fn is_null(&self) -> bool {
        matches!(self, Value::Scalar(PropertyValue::Null))
    }

    pub fn as_node(&self) -> Option<NodeId> {
        match self {
            Value::Node(n) => Some(*n),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Value::Scalar(v) => v.type_name(),
            Value::Node(_) => "node",
            Value::Edge(_) => "relationship",
            Value::Path(_) => "path",
            Value::List(_) => "list",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Node(_) => 0,
            Value::Edge(_) => 1,
            Value::Path(_) => 2,
            Value::List(_) => 3,
            Value::Scalar(_) => 4,
        }
    }

    /// Compact id-based rendering, unique per value. Used as the final
    /// tie-break when sorting.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        self.write_canonical(&mut s);
        s
    }

    fn write_canonical(&self, out: &mut String) {
        match self {
            Value::Scalar(v) => {
                let _ = write!(out, "{v}");
            }
            Value::Node(n) => {
                let _ = write!(out, "{n}");
            }
            Value::Edge(e) => {
                let _ = write!(out, "{e}");
            }
            Value::Path(p) => {
                let _ = write!(out, "<{}", p.start());
                for (e, n) in p.edges().iter().zip(&p.nodes()[1..]) {
                    let _ = write!(out, ",{e},{n}");
                }
                out.push('>');
            }
            Value::List(items) => {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    v.write_canonical(out);
                }
                out.push(']');
            }
        }
    }
}

/// Secondary sort key for rows that tie on the ORDER BY expression: the id
/// of the first node-valued column, then the canonical rendering of the row.
pub fn tie_break_key<'a>(columns: impl Iterator<Item = &'a Value>) -> (Option<NodeId>, String) {
    let mut first_node = None;
    let mut canon = String::new();
    for (i, v) in columns.enumerate() {
        if first_node.is_none() {
            first_node = v.as_node();
        }
        if i > 0 {
            canon.push('\t');
        }
        v.write_canonical(&mut canon);
    }
    (first_node, canon)
}

/// Total order over all values: nodes, relationships, paths, lists, then
/// scalars in [`PropertyValue::total_cmp`] order.
impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Scalar(a), Value::Scalar(b)) => a.total_cmp(b),
            (Value::Node(a), Value::Node(b)) => a.cmp(b),
            (Value::Edge(a), Value::Edge(b)) => a.cmp(b),
            (Value::Path(a), Value::Path(b)) => a.cmp(b),
            (Value::List(a), Value::List(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl From<PropertyValue> for Value {
    fn from(v: PropertyValue) -> Self {
        Value::Scalar(v)
    }
}

/// Ordered bag of rows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub warnings: Vec<String>,
}

impl ResultTable {
    pub fn new(columns: Vec<String>) -> Self {
        ResultTable { columns, rows: Vec::new(), warnings: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Same columns and the same rows with the same multiplicities, in any
    /// order.
    pub fn bag_eq(&self, other: &ResultTable) -> bool {
        if self.columns != other.columns || self.rows.len() != other.rows.len() {
            return false;
        }
        let mut a: Vec<&Vec<Value>> = self.rows.iter().collect();
        let mut b: Vec<&Vec<Value>> = other.rows.iter().collect();
        a.sort();
        b.sort();
        a == b
    }

    /// Tab-separated rendering: a header line, then one line per row.
    pub fn to_text(&self, graph: &PropertyGraph) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push('\t');
                }
                let _ = write!(out, "{}", Display { value: v, graph });
            }
            out.push('\n');
        }
        out
    }

    /// Rows as JSON arrays, one entry per column.
    pub fn rows_json(&self, graph: &PropertyGraph) -> Vec<Json> {
        self.rows.iter().map(|row| Json::Array(row.iter().map(|v| value_json(v, graph)).collect())).collect()
    }

    pub fn to_json(&self, graph: &PropertyGraph) -> Json {
        json!({ "columns": self.columns, "rows": self.rows_json(graph) })
    }
}

fn props_json(props: &PropertyMap) -> Json {
    let map: Map<String, Json> =
        props.iter().map(|(k, v)| (k.clone(), serde_json::to_value(v).unwrap_or(Json::Null))).collect();
    Json::Object(map)
}

/// JSON form of a value. Nodes and relationships carry their properties;
/// paths are id sequences.
pub fn value_json(value: &Value, graph: &PropertyGraph) -> Json {
    match value {
        Value::Scalar(v) => serde_json::to_value(v).unwrap_or(Json::Null),
        Value::Node(id) => match graph.node(*id) {
            Some(n) => json!({ "id": id.0, "label": n.label(), "properties": props_json(n.properties()) }),
            None => json!({ "id": id.0 }),
        },
        Value::Edge(id) => match graph.edge(*id) {
            Some(e) => json!({
                "id": id.0,
                "label": e.label(),
                "src": e.src().0,
                "dst": e.dst().0,
                "properties": props_json(e.properties()),
            }),
            None => json!({ "id": id.0 }),
        },
        Value::Path(p) => json!({
            "nodes": p.nodes().iter().map(|n| n.0).collect::<Vec<_>>(),
            "edges": p.edges().iter().map(|e| e.0).collect::<Vec<_>>(),
        }),
        Value::List(items) => Json::Array(items.iter().map(|v| value_json(v, graph)).collect()),
    }
}

/// Human-readable rendering of a value against its graph.
pub struct Display<'a> {
    pub value: &'a Value,
    pub graph: &'a PropertyGraph,
}

fn write_map(f: &mut fmt::Formatter<'_>, props: &PropertyMap) -> fmt::Result {
    if props.is_empty() {
        return Ok(());
    }
    f.write_str(" {")?;
    for (i, (k, v)) in props.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{k}: {v}")?;
    }
    f.write_str("}")
}

fn write_node(f: &mut fmt::Formatter<'_>, graph: &PropertyGraph, id: NodeId) -> fmt::Result {
    match graph.node(id) {
        Some(n) => {
            write!(f, "(:{}", n.label())?;
            write_map(f, n.properties())?;
            f.write_str(")")
        }
        None => write!(f, "({id})"),
    }
}

fn write_edge(f: &mut fmt::Formatter<'_>, graph: &PropertyGraph, id: EdgeId) -> fmt::Result {
    match graph.edge(id) {
        Some(e) => {
            write!(f, "[:{}", e.label())?;
            write_map(f, e.properties())?;
            f.write_str("]")
        }
        None => write!(f, "[{id}]"),
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let graph = self.graph;
        match self.value {
            Value::Scalar(v) => write!(f, "{v}"),
            Value::Node(id) => write_node(f, graph, *id),
            Value::Edge(id) => write_edge(f, graph, *id),
            Value::Path(p) => {
                write_node(f, graph, p.start())?;
                for (i, e) in p.edges().iter().enumerate() {
                    let (from, to) = (p.nodes()[i], p.nodes()[i + 1]);
                    let forward = graph.edge(*e).is_none_or(|edge| edge.src() == from);
                    f.write_str(if forward { "-" } else { "<-" })?;
                    write_edge(f, graph, *e)?;
                    f.write_str(if forward { "->" } else { "-" })?;
                    write_node(f, graph, to)?;
                }
                Ok(())
            }
            Value::List(items) => {
                f.write_str("[")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", Display { value: v, graph })?;
                }
                f.write_str("]")
            }
        }
    }
}
