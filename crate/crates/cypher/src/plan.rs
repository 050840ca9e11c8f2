//! Physical plans and the planner.
//!
//! A plan is a sequence of stages. Each stage is a pipeline of streaming
//! operators that push rows into a sink; blocking sinks (aggregation,
//! sorting) hand their output to the next stage. Rows are flat slot vectors
//! and every variable, named or anonymous, owns a slot.

use std::collections::{HashMap, HashSet};
use std::fmt;

use litgraph_core::{Direction, EdgeLabel, NodeLabel, PropertyGraph, PropertyValue};
use regex::Regex;

use crate::ast::*;
use crate::error::QueryError;
use crate::validate::{is_aggregating, validate};
use crate::value::Value;

#[derive(Debug, Clone, Copy)]
pub struct PlanOptions {
    /// When false every node pattern starts from a label or full scan.
    pub use_indexes: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions { use_indexes: true }
    }
}

pub type Props = Vec<(String, PropertyValue)>;

/// Compiled expression over row slots.
#[derive(Debug, Clone)]
pub enum CExpr {
    Const(Value),
    Slot(usize),
    Property(usize, String),
    Compare(CompareOp, Box<CExpr>, Box<CExpr>),
    Regex(Box<CExpr>, Regex),
    And(Vec<CExpr>),
    Nodes(Box<CExpr>),
}

/// One piece of a path under construction.
#[derive(Debug, Clone, Copy)]
pub enum PathPart {
    /// A single relationship slot followed by the node it leads to.
    Step { edge: usize, node: usize },
    /// A slot holding a path segment in pattern order.
    Segment(usize),
}

#[derive(Debug, Clone)]
pub enum Op {
    AllNodesScan {
        slot: usize,
        props: Props,
    },
    LabelScan {
        slot: usize,
        label: NodeLabel,
        props: Props,
    },
    IndexSeek {
        slot: usize,
        label: NodeLabel,
        key: String,
        value: PropertyValue,
        props: Props,
    },
    /// Re-checks a node bound earlier against a pattern.
    CheckNode {
        slot: usize,
        label: Option<NodeLabel>,
        props: Props,
    },
    Expand {
        from: usize,
        edge: usize,
        to: usize,
        label: Option<EdgeLabel>,
        direction: Direction,
        edge_props: Props,
        to_label: Option<NodeLabel>,
        to_props: Props,
        /// `to` is already bound; only edges reaching it qualify.
        into: bool,
        /// Slots holding relationships or segments bound earlier in the clause.
        unique: Vec<usize>,
    },
    VarExpand {
        from: usize,
        segment: usize,
        list: Option<usize>,
        to: usize,
        label: Option<EdgeLabel>,
        direction: Direction,
        edge_props: Props,
        to_label: Option<NodeLabel>,
        to_props: Props,
        min: u32,
        max: u32,
        into: bool,
        unique: Vec<usize>,
        /// Walking the pattern right to left; segments are flipped on output.
        reversed: bool,
    },
    ShortestPath {
        from: usize,
        to: usize,
        segment: usize,
        list: Option<usize>,
        label: Option<EdgeLabel>,
        direction: Direction,
        edge_props: Props,
        min: u32,
        max: u32,
        unique: Vec<usize>,
    },
    BuildPath {
        slot: usize,
        start: usize,
        parts: Vec<PathPart>,
    },
    Filter(CExpr),
    /// Evaluates expressions into slots of the current row.
    Project(Vec<(CExpr, usize)>),
    /// Starts a fresh row holding only the given values, in order.
    Reshape(Vec<CExpr>),
    Unwind {
        expr: CExpr,
        slot: usize,
    },
    Limit {
        id: usize,
        count: u64,
    },
}

#[derive(Debug, Clone)]
pub enum AggItem {
    Key(CExpr),
    CountStar,
    Count(CExpr),
}

#[derive(Debug, Clone)]
pub enum Sink {
    /// Groups rows by the key items; output rows hold the items in order.
    Aggregate(Vec<AggItem>),
    Sort {
        key: usize,
        descending: bool,
        tie_columns: Vec<usize>,
    },
    Output(Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub ops: Vec<Op>,
    pub sink: Sink,
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub stages: Vec<Stage>,
    pub columns: Vec<String>,
    pub warnings: Vec<String>,
    /// Slot count of every row.
    pub width: usize,
    pub limit_count: usize,
}

impl Plan {
    /// All streaming operators in execution order.
    pub fn operators(&self) -> impl Iterator<Item = &Op> {
        self.stages.iter().flat_map(|s| s.ops.iter())
    }
}

// ---- planner ----

pub fn plan(query: &Query, graph: &PropertyGraph, opts: PlanOptions) -> Result<Plan, QueryError> {
    validate(query)?;
    let mut p = Planner {
        graph,
        opts,
        vars: HashMap::new(),
        bound: HashSet::new(),
        next_slot: 0,
        width: 0,
        stages: Vec::new(),
        ops: Vec::new(),
        warnings: Vec::new(),
        limits: 0,
    };
    let columns = p.query(query)?;
    Ok(Plan { stages: p.stages, columns, warnings: p.warnings, width: p.width.max(1), limit_count: p.limits })
}

struct Planner<'g> {
    graph: &'g PropertyGraph,
    opts: PlanOptions,
    /// Variable name to slot in the current row layout.
    vars: HashMap<String, usize>,
    /// Slots that hold a value at the current point of the pipeline.
    bound: HashSet<usize>,
    next_slot: usize,
    width: usize,
    stages: Vec<Stage>,
    ops: Vec<Op>,
    warnings: Vec<String>,
    limits: usize,
}

fn literal_props(props: &[(String, Literal)]) -> Props {
    props.iter().map(|(k, v)| (k.clone(), v.to_value())).collect()
}

fn direction_of(d: RelDirection) -> Direction {
    match d {
        RelDirection::Outgoing => Direction::Outgoing,
        RelDirection::Incoming => Direction::Incoming,
        RelDirection::Undirected => Direction::Both,
    }
}

/// `v.key = literal` (either side), as (variable, key, value).
fn equality_on(expr: &Expr) -> Option<(&str, &str, PropertyValue)> {
    let Expr::Compare { op: CompareOp::Eq, lhs, rhs } = expr else { return None };
    match (lhs.as_ref(), rhs.as_ref()) {
        (Expr::Property { variable, key }, Expr::Literal(l)) | (Expr::Literal(l), Expr::Property { variable, key }) => {
            Some((variable, key, l.to_value()))
        }
        _ => None,
    }
}

impl Planner<'_> {
    fn alloc(&mut self) -> usize {
        let s = self.next_slot;
        self.next_slot += 1;
        self.width = self.width.max(self.next_slot);
        s
    }

    /// Starts a new row layout whose first slots hold `names`.
    fn reset_layout(&mut self, names: Vec<String>) {
        self.vars.clear();
        self.bound.clear();
        self.next_slot = 0;
        for name in names {
            let s = self.alloc();
            self.bound.insert(s);
            self.vars.insert(name, s);
        }
    }

    fn finish_stage(&mut self, sink: Sink) {
        let ops = std::mem::take(&mut self.ops);
        self.stages.push(Stage { ops, sink });
    }

    fn warn_unbounded(&mut self, rel: &RelPattern) {
        let msg = format!("variable-length relationship `{rel}` has no upper bound; capped at {DEFAULT_MAX_HOPS} hops");
        if !self.warnings.contains(&msg) {
            self.warnings.push(msg);
        }
    }

    fn compile(&self, expr: &Expr, names: &HashMap<String, usize>) -> Result<CExpr, QueryError> {
        Ok(match expr {
            Expr::Literal(l) => CExpr::Const(Value::Scalar(l.to_value())),
            Expr::Variable(v) => CExpr::Slot(*names.get(v).ok_or_else(|| QueryError::UnboundVariable(v.clone()))?),
            Expr::Property { variable, key } => CExpr::Property(
                *names.get(variable).ok_or_else(|| QueryError::UnboundVariable(variable.clone()))?,
                key.clone(),
            ),
            Expr::Compare { op, lhs, rhs } => {
                CExpr::Compare(*op, Box::new(self.compile(lhs, names)?), Box::new(self.compile(rhs, names)?))
            }
            Expr::Regex { lhs, pattern } => CExpr::Regex(Box::new(self.compile(lhs, names)?), compile_regex(pattern)?),
            Expr::And(parts) => CExpr::And(parts.iter().map(|p| self.compile(p, names)).collect::<Result<_, _>>()?),
            Expr::Nodes(inner) => CExpr::Nodes(Box::new(self.compile(inner, names)?)),
            Expr::Count(_) => return Err(QueryError::Semantic("unexpected aggregate".into())),
        })
    }

    fn query(&mut self, q: &Query) -> Result<Vec<String>, QueryError> {
        for clause in &q.clauses {
            match clause {
                Clause::Match(m) => self.match_clause(m)?,
                Clause::With(p) => self.with_clause(p)?,
                Clause::Unwind(u) => {
                    let expr = self.compile(&u.expr, &self.vars)?;
                    let slot = self.alloc();
                    self.ops.push(Op::Unwind { expr, slot });
                    self.bound.insert(slot);
                    self.vars.insert(u.variable.clone(), slot);
                }
                Clause::Return(p) => return self.return_clause(p, q),
            }
        }
        unreachable!("validated query ends with RETURN")
    }

    fn with_clause(&mut self, p: &Projection) -> Result<(), QueryError> {
        let names: Vec<String> = p.items.iter().map(ProjectionItem::name).collect();
        if is_aggregating(p) {
            let items = self.agg_items(p)?;
            self.finish_stage(Sink::Aggregate(items));
        } else {
            let exprs = p.items.iter().map(|i| self.compile(&i.expr, &self.vars)).collect::<Result<_, _>>()?;
            self.ops.push(Op::Reshape(exprs));
        }
        self.reset_layout(names);
        Ok(())
    }

    fn agg_items(&self, p: &Projection) -> Result<Vec<AggItem>, QueryError> {
        p.items
            .iter()
            .map(|i| {
                Ok(match &i.expr {
                    Expr::Count(None) => AggItem::CountStar,
                    Expr::Count(Some(inner)) => AggItem::Count(self.compile(inner, &self.vars)?),
                    e => AggItem::Key(self.compile(e, &self.vars)?),
                })
            })
            .collect()
    }

    fn return_clause(&mut self, p: &Projection, q: &Query) -> Result<Vec<String>, QueryError> {
        let names: Vec<String> = p.items.iter().map(ProjectionItem::name).collect();
        let out_slots: Vec<usize>;
        let mut order_names: HashMap<String, usize>;
        if is_aggregating(p) {
            let items = self.agg_items(p)?;
            self.finish_stage(Sink::Aggregate(items));
            self.reset_layout(names.clone());
            out_slots = (0..names.len()).collect();
            order_names = self.vars.clone();
        } else {
            let mut projections = Vec::new();
            let mut slots = Vec::new();
            for item in &p.items {
                match &item.expr {
                    Expr::Variable(v) => slots.push(self.vars[v]),
                    e => {
                        let c = self.compile(e, &self.vars)?;
                        let s = self.alloc();
                        projections.push((c, s));
                        slots.push(s);
                    }
                }
            }
            if !projections.is_empty() {
                self.ops.push(Op::Project(projections));
            }
            out_slots = slots;
            order_names = self.vars.clone();
            for (n, s) in names.iter().zip(&out_slots) {
                order_names.insert(n.clone(), *s);
            }
        }

        if let Some(order) = &q.order_by {
            let printed = order.expr.to_string();
            let key = match names.iter().position(|n| *n == printed) {
                Some(i) => out_slots[i],
                None => {
                    let c = self.compile(&order.expr, &order_names)?;
                    match c {
                        CExpr::Slot(s) => s,
                        c => {
                            let s = self.alloc();
                            self.ops.push(Op::Project(vec![(c, s)]));
                            s
                        }
                    }
                }
            };
            order_names.clear();
            self.finish_stage(Sink::Sort { key, descending: order.descending, tie_columns: out_slots.clone() });
        }
        if let Some(count) = q.limit {
            let id = self.limits;
            self.limits += 1;
            self.ops.push(Op::Limit { id, count });
        }
        self.finish_stage(Sink::Output(out_slots));
        Ok(names)
    }

    // ---- MATCH ----

    fn match_clause(&mut self, m: &MatchClause) -> Result<(), QueryError> {
        let mut pending: Vec<Expr> =
            m.predicate.as_ref().map(|p| p.conjuncts().into_iter().cloned().collect()).unwrap_or_default();
        let mut clause_rels: Vec<usize> = Vec::new();
        self.flush_filters(&mut pending)?;
        for pattern in &m.patterns {
            if pattern.shortest {
                self.shortest_pattern(pattern, &mut pending, &mut clause_rels)?;
            } else {
                self.chain_pattern(pattern, &mut pending, &mut clause_rels)?;
            }
        }
        debug_assert!(pending.is_empty(), "every conjunct is placed once its variables are bound");
        self.flush_filters(&mut pending)?;
        Ok(())
    }

    fn is_bound(&self, expr: &Expr) -> bool {
        expr.variables().iter().all(|v| self.vars.get(*v).is_some_and(|s| self.bound.contains(s)))
    }

    fn flush_filters(&mut self, pending: &mut Vec<Expr>) -> Result<(), QueryError> {
        let mut i = 0;
        while i < pending.len() {
            if self.is_bound(&pending[i]) {
                let e = pending.remove(i);
                let c = self.compile(&e, &self.vars)?;
                self.ops.push(Op::Filter(c));
            } else {
                i += 1;
            }
        }
        Ok(())
    }

    /// Slot for a node pattern, allocating one for new or anonymous variables.
    fn node_slot(&mut self, node: &NodePattern) -> usize {
        match &node.variable {
            Some(v) => match self.vars.get(v) {
                Some(s) => *s,
                None => {
                    let s = self.alloc();
                    self.vars.insert(v.clone(), s);
                    s
                }
            },
            None => self.alloc(),
        }
    }

    /// An index seek usable for `node`: from its property map, or from a
    /// pending WHERE equality (returned as its index in `pending`).
    fn seek_for(&self, node: &NodePattern, pending: &[Expr]) -> Option<(String, PropertyValue, Option<usize>)> {
        if !self.opts.use_indexes {
            return None;
        }
        let label = node.label?;
        for (k, v) in &node.properties {
            if self.graph.has_index(label, k) {
                return Some((k.clone(), v.to_value(), None));
            }
        }
        let var = node.variable.as_deref()?;
        pending.iter().enumerate().find_map(|(i, e)| {
            let (v, key, value) = equality_on(e)?;
            (v == var && self.graph.has_index(label, key)).then(|| (key.to_owned(), value, Some(i)))
        })
    }

    fn score(&self, node: &NodePattern, slot: usize, pending: &[Expr]) -> u8 {
        if self.bound.contains(&slot) {
            3
        } else if self.seek_for(node, pending).is_some() {
            2
        } else if node.label.is_some() {
            1
        } else {
            0
        }
    }

    /// Emits the operator that binds (or re-checks) a chain's first node.
    fn bind_start(&mut self, node: &NodePattern, slot: usize, pending: &mut Vec<Expr>) -> Result<(), QueryError> {
        let props = literal_props(&node.properties);
        if self.bound.contains(&slot) {
            if node.label.is_some() || !props.is_empty() {
                self.ops.push(Op::CheckNode { slot, label: node.label, props });
            }
        } else if let Some((key, value, from_where)) = self.seek_for(node, pending) {
            if let Some(i) = from_where {
                pending.remove(i);
            }
            let label = node.label.expect("seek needs a label");
            let props = props.into_iter().filter(|(k, v)| !(*k == key && *v == value)).collect();
            self.ops.push(Op::IndexSeek { slot, label, key, value, props });
        } else if let Some(label) = node.label {
            self.ops.push(Op::LabelScan { slot, label, props });
        } else {
            self.ops.push(Op::AllNodesScan { slot, props });
        }
        self.bound.insert(slot);
        self.flush_filters(pending)
    }

    fn chain_pattern(
        &mut self,
        pattern: &Pattern,
        pending: &mut Vec<Expr>,
        clause_rels: &mut Vec<usize>,
    ) -> Result<(), QueryError> {
        let chain = &pattern.chain;
        let nodes: Vec<&NodePattern> = chain.nodes().collect();
        let slots: Vec<usize> = nodes.iter().map(|n| self.node_slot(n)).collect();

        // start from the most selective node; ties go left
        let mut start = 0;
        let mut best = 0;
        for (i, (n, s)) in nodes.iter().zip(&slots).enumerate() {
            let sc = self.score(n, *s, pending);
            if i == 0 || sc > best {
                best = sc;
                start = i;
            }
        }
        self.bind_start(nodes[start], slots[start], pending)?;

        // rel slots per step: (edge-or-segment slot, is segment)
        let mut rel_slots: Vec<(usize, bool)> = vec![(0, false); chain.steps.len()];
        let order: Vec<(usize, bool)> =
            (start..chain.steps.len()).map(|i| (i, false)).chain((0..start).rev().map(|i| (i, true))).collect();
        for (i, reversed) in order {
            let rel = &chain.steps[i].0;
            let (from, to, to_node) =
                if reversed { (slots[i + 1], slots[i], nodes[i]) } else { (slots[i], slots[i + 1], nodes[i + 1]) };
            let slot = self.expand(rel, from, to, to_node, reversed, clause_rels)?;
            rel_slots[i] = (slot, rel.range.is_some());
            self.flush_filters(pending)?;
        }

        if let Some(var) = &pattern.variable {
            let parts = rel_slots
                .iter()
                .zip(&slots[1..])
                .map(
                    |(&(rel, seg), &node)| {
                        if seg {
                            PathPart::Segment(rel)
                        } else {
                            PathPart::Step { edge: rel, node }
                        }
                    },
                )
                .collect();
            let slot = self.alloc();
            self.ops.push(Op::BuildPath { slot, start: slots[0], parts });
            self.bound.insert(slot);
            self.vars.insert(var.clone(), slot);
            self.flush_filters(pending)?;
        }
        Ok(())
    }

    /// Emits one expansion step and returns the slot holding the bound
    /// relationship (or path segment for variable-length steps).
    fn expand(
        &mut self,
        rel: &RelPattern,
        from: usize,
        to: usize,
        to_node: &NodePattern,
        reversed: bool,
        clause_rels: &mut Vec<usize>,
    ) -> Result<usize, QueryError> {
        let mut direction = direction_of(rel.direction);
        if reversed {
            direction = direction.reversed();
        }
        let into = self.bound.contains(&to);
        let unique = clause_rels.clone();
        let edge_props = literal_props(&rel.properties);
        let to_props = literal_props(&to_node.properties);
        let slot = match rel.range {
            None => {
                let edge = self.rel_var_slot(rel);
                self.ops.push(Op::Expand {
                    from,
                    edge,
                    to,
                    label: rel.label,
                    direction,
                    edge_props,
                    to_label: to_node.label,
                    to_props,
                    into,
                    unique,
                });
                edge
            }
            Some(range) => {
                if range.max.is_none() {
                    self.warn_unbounded(rel);
                }
                let segment = self.alloc();
                let list = rel.variable.as_ref().map(|_| self.rel_var_slot(rel));
                self.ops.push(Op::VarExpand {
                    from,
                    segment,
                    list,
                    to,
                    label: rel.label,
                    direction,
                    edge_props,
                    to_label: to_node.label,
                    to_props,
                    min: range.effective_min(),
                    max: range.effective_max(),
                    into,
                    unique,
                    reversed,
                });
                if let Some(l) = list {
                    self.bound.insert(l);
                }
                segment
            }
        };
        self.bound.insert(slot);
        self.bound.insert(to);
        clause_rels.push(slot);
        Ok(slot)
    }

    fn rel_var_slot(&mut self, rel: &RelPattern) -> usize {
        let s = self.alloc();
        if let Some(v) = &rel.variable {
            self.vars.insert(v.clone(), s);
        }
        s
    }

    fn shortest_pattern(
        &mut self,
        pattern: &Pattern,
        pending: &mut Vec<Expr>,
        clause_rels: &mut Vec<usize>,
    ) -> Result<(), QueryError> {
        let chain = &pattern.chain;
        let (rel, end) = &chain.steps[0];
        let from = self.node_slot(&chain.start);
        let to = self.node_slot(end);
        self.bind_start(&chain.start, from, pending)?;
        self.bind_start(end, to, pending)?;

        let (min, max) = match rel.range {
            None => (1, 1),
            Some(r) => {
                if r.max.is_none() {
                    self.warn_unbounded(rel);
                }
                (r.effective_min(), r.effective_max())
            }
        };
        let segment = self.alloc();
        let list = rel.variable.as_ref().map(|_| self.rel_var_slot(rel));
        self.ops.push(Op::ShortestPath {
            from,
            to,
            segment,
            list,
            label: rel.label,
            direction: direction_of(rel.direction),
            edge_props: literal_props(&rel.properties),
            min,
            max,
            unique: clause_rels.clone(),
        });
        self.bound.insert(segment);
        if let Some(l) = list {
            self.bound.insert(l);
        }
        clause_rels.push(segment);
        self.flush_filters(pending)?;

        if let Some(var) = &pattern.variable {
            let slot = self.alloc();
            self.ops.push(Op::BuildPath { slot, start: from, parts: vec![PathPart::Segment(segment)] });
            self.bound.insert(slot);
            self.vars.insert(var.clone(), slot);
            self.flush_filters(pending)?;
        }
        Ok(())
    }
}

/// Whole-string regex; `(?i)` and other inline flags keep working because
/// the pattern is wrapped in a non-capturing group.
pub fn compile_regex(pattern: &str) -> Result<Regex, QueryError> {
    Regex::new(&format!("^(?:{pattern})$"))
        .map_err(|e| QueryError::Semantic(format!("invalid regular expression {pattern:?}: {e}")))
}

// ---- display ----

fn write_props(f: &mut fmt::Formatter<'_>, props: &Props) -> fmt::Result {
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

fn arrow(d: Direction) -> (&'static str, &'static str) {
    match d {
        Direction::Outgoing => ("-", "->"),
        Direction::Incoming => ("<-", "-"),
        Direction::Both => ("-", "-"),
    }
}

impl fmt::Display for CExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CExpr::Const(v) => write!(f, "{}", v.canonical()),
            CExpr::Slot(s) => write!(f, "#{s}"),
            CExpr::Property(s, k) => write!(f, "#{s}.{k}"),
            CExpr::Compare(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            CExpr::Regex(l, re) => write!(f, "({l} =~ /{}/)", re.as_str()),
            CExpr::And(parts) => {
                f.write_str("(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" AND ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str(")")
            }
            CExpr::Nodes(inner) => write!(f, "nodes({inner})"),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::AllNodesScan { slot, props } => {
                write!(f, "AllNodesScan(#{slot}")?;
                write_props(f, props)?;
                f.write_str(")")
            }
            Op::LabelScan { slot, label, props } => {
                write!(f, "LabelScan(#{slot}:{label}")?;
                write_props(f, props)?;
                f.write_str(")")
            }
            Op::IndexSeek { slot, label, key, value, props } => {
                write!(f, "IndexSeek(#{slot}:{label}.{key} = {value}")?;
                write_props(f, props)?;
                f.write_str(")")
            }
            Op::CheckNode { slot, label, props } => {
                write!(f, "CheckNode(#{slot}")?;
                if let Some(l) = label {
                    write!(f, ":{l}")?;
                }
                write_props(f, props)?;
                f.write_str(")")
            }
            Op::Expand { from, edge, to, label, direction, into, .. } => {
                let (l, r) = arrow(*direction);
                write!(f, "Expand{}(#{from}){l}[#{edge}", if *into { "Into" } else { "" })?;
                if let Some(lb) = label {
                    write!(f, ":{lb}")?;
                }
                write!(f, "]{r}(#{to})")
            }
            Op::VarExpand { from, segment, to, label, direction, min, max, into, .. } => {
                let (l, r) = arrow(*direction);
                write!(f, "VarLengthExpand{}(#{from}){l}[#{segment}", if *into { "Into" } else { "" })?;
                if let Some(lb) = label {
                    write!(f, ":{lb}")?;
                }
                write!(f, "*{min}..{max}]{r}(#{to})")
            }
            Op::ShortestPath { from, to, segment, label, direction, min, max, .. } => {
                let (l, r) = arrow(*direction);
                write!(f, "ShortestPathSearch((#{from}){l}[#{segment}")?;
                if let Some(lb) = label {
                    write!(f, ":{lb}")?;
                }
                write!(f, "*{min}..{max}]{r}(#{to}))")
            }
            Op::BuildPath { slot, .. } => write!(f, "BuildPath(#{slot})"),
            Op::Filter(e) => write!(f, "Filter{e}"),
            Op::Project(items) => {
                f.write_str("Project(")?;
                for (i, (e, s)) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "#{s} := {e}")?;
                }
                f.write_str(")")
            }
            Op::Reshape(items) => {
                f.write_str("Project[new row](")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            Op::Unwind { expr, slot } => write!(f, "Unwind({expr} -> #{slot})"),
            Op::Limit { count, .. } => write!(f, "Limit({count})"),
        }
    }
}

impl fmt::Display for Sink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sink::Aggregate(items) => {
                f.write_str("Aggregate(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    match item {
                        AggItem::Key(e) => write!(f, "{e}")?,
                        AggItem::CountStar => f.write_str("count(*)")?,
                        AggItem::Count(e) => write!(f, "count({e})")?,
                    }
                }
                f.write_str(")")
            }
            Sink::Sort { key, descending, .. } => {
                write!(f, "Sort(#{key}{})", if *descending { " DESC" } else { "" })
            }
            Sink::Output(cols) => {
                f.write_str("Output(")?;
                for (i, c) in cols.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "#{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, stage) in self.stages.iter().enumerate() {
            writeln!(f, "stage {i}")?;
            for op in &stage.ops {
                writeln!(f, "  {op}")?;
            }
            writeln!(f, "  => {}", stage.sink)?;
        }
        Ok(())
    }
}
