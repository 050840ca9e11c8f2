//! Push-based plan executor.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use litgraph_core::{Direction, EdgeId, EdgeLabel, NodeId, NodeLabel, Path, PropertyGraph, PropertyValue};

use crate::ast::{CompareOp, Query};
use crate::error::QueryError;
use crate::parser::parse;
use crate::plan::{plan, AggItem, CExpr, Op, PathPart, Plan, PlanOptions, Props, Sink};
use crate::value::{tie_break_key, ResultTable, Value};

#[derive(Debug, Clone, Copy)]
pub struct ExecOptions {
    /// Result rows beyond this fail with [`QueryError::RowLimitExceeded`].
    pub max_rows: usize,
    pub timeout: Option<Duration>,
    pub use_indexes: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { max_rows: usize::MAX, timeout: None, use_indexes: true }
    }
}

/// Parses, plans and runs `text`.
pub fn execute(text: &str, graph: &PropertyGraph, opts: ExecOptions) -> Result<ResultTable, QueryError> {
    execute_query(&parse(text)?, graph, opts)
}

pub fn execute_query(query: &Query, graph: &PropertyGraph, opts: ExecOptions) -> Result<ResultTable, QueryError> {
    let started = Instant::now();
    let p = plan(query, graph, PlanOptions { use_indexes: opts.use_indexes })?;
    let deadline = opts.timeout.map(|t| started + t);
    run(&p, graph, opts.max_rows, deadline)
}

pub fn execute_plan(p: &Plan, graph: &PropertyGraph, opts: ExecOptions) -> Result<ResultTable, QueryError> {
    run(p, graph, opts.max_rows, opts.timeout.map(|t| Instant::now() + t))
}

type Row = Vec<Value>;

#[derive(Debug, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

struct Ctx<'g> {
    graph: &'g PropertyGraph,
    deadline: Option<Instant>,
    ticks: u32,
    limits: Vec<u64>,
    width: usize,
}

impl Ctx<'_> {
    fn tick(&mut self) -> Result<(), QueryError> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks & 1023 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(QueryError::Timeout);
                }
            }
        }
        Ok(())
    }
}

enum SinkState<'p> {
    Aggregate { items: &'p [AggItem], index: BTreeMap<Vec<Value>, usize>, groups: Vec<(Vec<Value>, Vec<i64>)> },
    Sort { rows: Vec<Row> },
    Output { cols: &'p [usize], rows: Vec<Row>, max_rows: usize, overflow: bool },
}

fn run(p: &Plan, graph: &PropertyGraph, max_rows: usize, deadline: Option<Instant>) -> Result<ResultTable, QueryError> {
    let mut ctx = Ctx { graph, deadline, ticks: 0, limits: vec![0; p.limit_count], width: p.width };
    let mut input: Vec<Row> = vec![vec![Value::NULL; p.width]];
    for stage in &p.stages {
        let mut sink = match &stage.sink {
            Sink::Aggregate(items) => SinkState::Aggregate { items, index: BTreeMap::new(), groups: Vec::new() },
            Sink::Sort { .. } => SinkState::Sort { rows: Vec::new() },
            Sink::Output(cols) => SinkState::Output { cols, rows: Vec::new(), max_rows, overflow: false },
        };
        for mut row in std::mem::take(&mut input) {
            if push(&stage.ops, &mut row, &mut ctx, &mut sink)? == Flow::Stop {
                break;
            }
        }
        match (sink, &stage.sink) {
            (SinkState::Aggregate { items, groups, .. }, _) => {
                let mut groups = groups;
                let has_keys = items.iter().any(|i| matches!(i, AggItem::Key(_)));
                if groups.is_empty() && !has_keys {
                    let n = items.len();
                    groups.push((Vec::new(), vec![0; n]));
                }
                for (keys, counts) in groups {
                    let mut row = vec![Value::NULL; ctx.width];
                    let mut k = keys.into_iter();
                    for (j, item) in items.iter().enumerate() {
                        row[j] = match item {
                            AggItem::Key(_) => k.next().expect("one key per key item"),
                            _ => Value::Scalar(PropertyValue::Integer(counts[j])),
                        };
                    }
                    input.push(row);
                }
            }
            (SinkState::Sort { mut rows }, Sink::Sort { key, descending, tie_columns }) => {
                sort_rows(&mut rows, *key, *descending, tie_columns);
                input = rows;
            }
            (SinkState::Output { rows, overflow, .. }, _) => {
                let mut table = ResultTable::new(p.columns.clone());
                table.rows = rows;
                table.warnings = p.warnings.clone();
                if overflow {
                    return Err(QueryError::RowLimitExceeded(Box::new(table)));
                }
                return Ok(table);
            }
            _ => unreachable!("sink state mirrors its sink"),
        }
    }
    unreachable!("every plan ends in an output stage")
}

/// Sorts by the key column, then by the first node-valued output column,
/// then by the canonical rendering of the output columns.
pub(crate) fn sort_rows(rows: &mut Vec<Row>, key: usize, descending: bool, tie_columns: &[usize]) {
    let mut keyed: Vec<(Value, (Option<NodeId>, String), Row)> = rows
        .drain(..)
        .map(|r| {
            let cols: Vec<&Value> = tie_columns.iter().map(|&c| &r[c]).collect();
            (r[key].clone(), tie_break_key(cols.into_iter()), r)
        })
        .collect();
    keyed.sort_by(|a, b| {
        let k = a.0.cmp(&b.0);
        let k = if descending { k.reverse() } else { k };
        k.then_with(|| a.1.cmp(&b.1))
    });
    rows.extend(keyed.into_iter().map(|(_, _, r)| r));
}

fn push(ops: &[Op], row: &mut Row, ctx: &mut Ctx<'_>, sink: &mut SinkState<'_>) -> Result<Flow, QueryError> {
    let Some((op, rest)) = ops.split_first() else {
        return emit(row, ctx, sink);
    };
    let graph = ctx.graph;
    match op {
        Op::AllNodesScan { slot, props } => {
            for n in graph.node_ids() {
                ctx.tick()?;
                if node_matches(graph, n, None, props) {
                    row[*slot] = Value::Node(n);
                    if push(rest, row, ctx, sink)? == Flow::Stop {
                        return Ok(Flow::Stop);
                    }
                }
            }
        }
        Op::LabelScan { slot, label, props } => {
            for &n in graph.nodes_with_label(*label) {
                ctx.tick()?;
                if node_matches(graph, n, None, props) {
                    row[*slot] = Value::Node(n);
                    if push(rest, row, ctx, sink)? == Flow::Stop {
                        return Ok(Flow::Stop);
                    }
                }
            }
        }
        Op::IndexSeek { slot, label, key, value, props } => {
            for n in graph.index_lookup(*label, key, value) {
                ctx.tick()?;
                if node_matches(graph, n, None, props) {
                    row[*slot] = Value::Node(n);
                    if push(rest, row, ctx, sink)? == Flow::Stop {
                        return Ok(Flow::Stop);
                    }
                }
            }
        }
        Op::CheckNode { slot, label, props } => {
            let ok = row[*slot].as_node().is_some_and(|n| node_matches(graph, n, *label, props));
            if ok {
                return push(rest, row, ctx, sink);
            }
        }
        Op::Expand { from, edge, to, label, direction, edge_props, to_label, to_props, into, unique } => {
            let Some(src) = row[*from].as_node() else { return Ok(Flow::Continue) };
            let target = if *into { row[*to].as_node() } else { None };
            if *into && target.is_none() {
                return Ok(Flow::Continue);
            }
            for (e, m) in incident(graph, src, *label, *direction)? {
                ctx.tick()?;
                if target.is_some_and(|t| t != m)
                    || !edge_matches(graph, e, edge_props)
                    || !node_matches(graph, m, *to_label, to_props)
                    || collides(row, unique, e)
                {
                    continue;
                }
                row[*edge] = Value::Edge(e);
                row[*to] = Value::Node(m);
                if push(rest, row, ctx, sink)? == Flow::Stop {
                    return Ok(Flow::Stop);
                }
            }
        }
        Op::VarExpand { from, segment, list, to, min, max, reversed, into, .. } => {
            let Some(src) = row[*from].as_node() else { return Ok(Flow::Continue) };
            let target = if *into { row[*to].as_node() } else { None };
            if *into && target.is_none() {
                return Ok(Flow::Continue);
            }
            let mut walk = Walk {
                op,
                rest,
                target,
                segment: *segment,
                list: *list,
                to: *to,
                min: *min,
                max: *max,
                reversed: *reversed,
                path: Path::single(src),
            };
            return walk.extend(row, ctx, sink);
        }
        Op::ShortestPath { from, to, segment, list, label, direction, edge_props, min, max, unique } => {
            let (Some(a), Some(b)) = (row[*from].as_node(), row[*to].as_node()) else {
                return Ok(Flow::Continue);
            };
            ctx.tick()?;
            let found = graph
                .shortest_path_by(a, b, *max, *direction, |e, edge| {
                    label.is_none_or(|l| edge.label() == l) && edge_matches(graph, e, edge_props)
                })
                .map_err(|e| QueryError::Eval(e.to_string()))?;
            let Some(path) = found else { return Ok(Flow::Continue) };
            if (path.len() as u32) < *min || path.edges().iter().any(|e| collides(row, unique, *e)) {
                return Ok(Flow::Continue);
            }
            if let Some(l) = list {
                row[*l] = Value::List(path.edges().iter().map(|e| Value::Edge(*e)).collect());
            }
            row[*segment] = Value::Path(path);
            return push(rest, row, ctx, sink);
        }
        Op::BuildPath { slot, start, parts } => {
            let Some(n) = row[*start].as_node() else { return Ok(Flow::Continue) };
            let mut path = Path::single(n);
            for part in parts {
                match part {
                    PathPart::Step { edge, node } => match (&row[*edge], &row[*node]) {
                        (Value::Edge(e), Value::Node(m)) => path.push(*e, *m),
                        _ => return Ok(Flow::Continue),
                    },
                    PathPart::Segment(s) => match &row[*s] {
                        Value::Path(seg) => path.extend_with(seg),
                        _ => return Ok(Flow::Continue),
                    },
                }
            }
            row[*slot] = Value::Path(path);
            return push(rest, row, ctx, sink);
        }
        Op::Filter(pred) => {
            if truthy(&eval(pred, row, graph)?) {
                return push(rest, row, ctx, sink);
            }
        }
        Op::Project(items) => {
            for (e, s) in items {
                row[*s] = eval(e, row, graph)?;
            }
            return push(rest, row, ctx, sink);
        }
        Op::Reshape(exprs) => {
            let mut fresh = vec![Value::NULL; ctx.width];
            for (i, e) in exprs.iter().enumerate() {
                fresh[i] = eval(e, row, graph)?;
            }
            return push(rest, &mut fresh, ctx, sink);
        }
        Op::Unwind { expr, slot } => match eval(expr, row, graph)? {
            Value::List(items) => {
                for v in items {
                    ctx.tick()?;
                    row[*slot] = v;
                    if push(rest, row, ctx, sink)? == Flow::Stop {
                        return Ok(Flow::Stop);
                    }
                }
            }
            v if v.is_null() => {}
            v => {
                row[*slot] = v;
                return push(rest, row, ctx, sink);
            }
        },
        Op::Limit { id, count } => {
            if ctx.limits[*id] >= *count {
                return Ok(Flow::Stop);
            }
            ctx.limits[*id] += 1;
            let flow = push(rest, row, ctx, sink)?;
            if ctx.limits[*id] >= *count {
                return Ok(Flow::Stop);
            }
            return Ok(flow);
        }
    }
    Ok(Flow::Continue)
}

/// Depth-first enumeration of edge-unique trails for a variable-length step.
struct Walk<'o> {
    op: &'o Op,
    rest: &'o [Op],
    target: Option<NodeId>,
    segment: usize,
    list: Option<usize>,
    to: usize,
    min: u32,
    max: u32,
    reversed: bool,
    path: Path,
}

impl Walk<'_> {
    fn extend(&mut self, row: &mut Row, ctx: &mut Ctx<'_>, sink: &mut SinkState<'_>) -> Result<Flow, QueryError> {
        let Op::VarExpand { label, direction, edge_props, to_label, to_props, unique, .. } = self.op else {
            unreachable!()
        };
        let graph = ctx.graph;
        let here = self.path.end();
        let depth = self.path.len() as u32;
        if depth >= self.min && self.target.is_none_or(|t| t == here) && node_matches(graph, here, *to_label, to_props)
        {
            let seg = if self.reversed { self.path.reversed() } else { self.path.clone() };
            if let Some(l) = self.list {
                row[l] = Value::List(seg.edges().iter().map(|e| Value::Edge(*e)).collect());
            }
            row[self.segment] = Value::Path(seg);
            row[self.to] = Value::Node(here);
            if push(self.rest, row, ctx, sink)? == Flow::Stop {
                return Ok(Flow::Stop);
            }
        }
        if depth >= self.max {
            return Ok(Flow::Continue);
        }
        for (e, m) in incident(graph, here, *label, *direction)? {
            ctx.tick()?;
            if self.path.edges().contains(&e) || !edge_matches(graph, e, edge_props) || collides(row, unique, e) {
                continue;
            }
            self.path.push(e, m);
            let flow = self.extend(row, ctx, sink);
            self.path.pop();
            if flow? == Flow::Stop {
                return Ok(Flow::Stop);
            }
        }
        Ok(Flow::Continue)
    }
}

fn emit(row: &mut Row, ctx: &mut Ctx<'_>, sink: &mut SinkState<'_>) -> Result<Flow, QueryError> {
    match sink {
        SinkState::Aggregate { items, index, groups } => {
            let graph = ctx.graph;
            let mut keys = Vec::new();
            for item in items.iter() {
                if let AggItem::Key(e) = item {
                    keys.push(eval(e, row, graph)?);
                }
            }
            let g = match index.get(&keys) {
                Some(&g) => g,
                None => {
                    index.insert(keys.clone(), groups.len());
                    groups.push((keys, vec![0; items.len()]));
                    groups.len() - 1
                }
            };
            for (j, item) in items.iter().enumerate() {
                match item {
                    AggItem::Key(_) => {}
                    AggItem::CountStar => groups[g].1[j] += 1,
                    AggItem::Count(e) => {
                        if !eval(e, row, graph)?.is_null() {
                            groups[g].1[j] += 1;
                        }
                    }
                }
            }
        }
        SinkState::Sort { rows } => rows.push(row.clone()),
        SinkState::Output { cols, rows, max_rows, overflow } => {
            if rows.len() >= *max_rows {
                *overflow = true;
                return Ok(Flow::Stop);
            }
            rows.push(cols.iter().map(|&c| row[c].clone()).collect());
        }
    }
    Ok(Flow::Continue)
}

/// Incident edges; in undirected mode a self-loop is reported once.
fn incident(
    graph: &PropertyGraph,
    node: NodeId,
    label: Option<EdgeLabel>,
    direction: Direction,
) -> Result<impl Iterator<Item = (EdgeId, NodeId)> + '_, QueryError> {
    let err = |e: litgraph_core::GraphError| QueryError::Eval(e.to_string());
    let out = (direction != Direction::Incoming)
        .then(|| graph.neighbors_iter(node, label, Direction::Outgoing))
        .transpose()
        .map_err(err)?;
    let inc = (direction != Direction::Outgoing)
        .then(|| graph.neighbors_iter(node, label, Direction::Incoming))
        .transpose()
        .map_err(err)?;
    let both = direction == Direction::Both;
    Ok(out.into_iter().flatten().chain(inc.into_iter().flatten().filter(move |&(_, m)| !(both && m == node))))
}

fn props_match(actual: impl Fn(&str) -> PropertyValue, wanted: &Props) -> bool {
    wanted.iter().all(|(k, v)| actual(k).strict_eq(v) == Some(true))
}

fn node_matches(graph: &PropertyGraph, n: NodeId, label: Option<NodeLabel>, props: &Props) -> bool {
    let Some(node) = graph.node(n) else { return false };
    label.is_none_or(|l| node.label() == l) && props_match(|k| node.property(k).clone(), props)
}

fn edge_matches(graph: &PropertyGraph, e: EdgeId, props: &Props) -> bool {
    if props.is_empty() {
        return true;
    }
    let Some(edge) = graph.edge(e) else { return false };
    props_match(|k| edge.property(k).clone(), props)
}

fn collides(row: &Row, unique: &[usize], e: EdgeId) -> bool {
    unique.iter().any(|&s| match &row[s] {
        Value::Edge(x) => *x == e,
        Value::Path(p) => p.edges().contains(&e),
        _ => false,
    })
}

fn truthy(v: &Value) -> bool {
    matches!(v, Value::Scalar(PropertyValue::Boolean(true)))
}

fn boolean(b: Option<bool>) -> Value {
    Value::Scalar(b.map_or(PropertyValue::Null, PropertyValue::Boolean))
}

pub(crate) fn eval(e: &CExpr, row: &[Value], graph: &PropertyGraph) -> Result<Value, QueryError> {
    Ok(match e {
        CExpr::Const(v) => v.clone(),
        CExpr::Slot(s) => row[*s].clone(),
        CExpr::Property(s, key) => match &row[*s] {
            Value::Node(n) => Value::Scalar(graph.node(*n).map_or(PropertyValue::Null, |n| n.property(key).clone())),
            Value::Edge(x) => Value::Scalar(graph.edge(*x).map_or(PropertyValue::Null, |x| x.property(key).clone())),
            v if v.is_null() => Value::NULL,
            v => return Err(QueryError::Eval(format!("cannot read property `{key}` of a {}", v.kind_name()))),
        },
        CExpr::Compare(op, l, r) => boolean(compare(*op, &eval(l, row, graph)?, &eval(r, row, graph)?)),
        CExpr::Regex(l, re) => match eval(l, row, graph)? {
            Value::Scalar(PropertyValue::Text(s)) => boolean(Some(re.is_match(&s))),
            v if v.is_null() => Value::NULL,
            v => return Err(QueryError::Eval(format!("=~ needs a text value, got a {}", v.kind_name()))),
        },
        CExpr::And(parts) => {
            let mut unknown = false;
            for p in parts {
                match eval(p, row, graph)? {
                    Value::Scalar(PropertyValue::Boolean(false)) => return Ok(boolean(Some(false))),
                    Value::Scalar(PropertyValue::Boolean(true)) => {}
                    v if v.is_null() => unknown = true,
                    v => return Err(QueryError::Eval(format!("AND needs boolean operands, got a {}", v.kind_name()))),
                }
            }
            boolean(if unknown { None } else { Some(true) })
        }
        CExpr::Nodes(inner) => match eval(inner, row, graph)? {
            Value::Path(p) => Value::List(p.nodes().iter().map(|n| Value::Node(*n)).collect()),
            v if v.is_null() => Value::NULL,
            v => return Err(QueryError::Eval(format!("nodes() needs a path, got a {}", v.kind_name()))),
        },
    })
}

/// Three-valued comparison; `None` is unknown.
fn compare(op: CompareOp, l: &Value, r: &Value) -> Option<bool> {
    if l.is_null() || r.is_null() {
        return None;
    }
    match (l, r) {
        (Value::Scalar(a), Value::Scalar(b)) => match op {
            CompareOp::Eq => a.strict_eq(b),
            _ => {
                let ord = a.compare(b)?;
                Some(match op {
                    CompareOp::Lt => ord == Ordering::Less,
                    CompareOp::Gt => ord == Ordering::Greater,
                    CompareOp::Le => ord != Ordering::Greater,
                    CompareOp::Ge => ord != Ordering::Less,
                    CompareOp::Eq => unreachable!(),
                })
            }
        },
        _ if op == CompareOp::Eq => Some(l == r),
        _ => None,
    }
}
