//! Syntax tree for parsed queries. `Display` prints a tree back as query text
//! that parses to an equal tree.

use std::fmt;

use litgraph_core::{EdgeLabel, NodeLabel, PropertyValue};

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    /// MATCH / WITH / UNWIND clauses followed by exactly one RETURN.
    pub clauses: Vec<Clause>,
    pub order_by: Option<OrderBy>,
    pub limit: Option<u64>,
}

impl Query {
    pub fn return_clause(&self) -> &Projection {
        match self.clauses.last() {
            Some(Clause::Return(p)) => p,
            _ => unreachable!("parser guarantees a trailing RETURN"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clause {
    Match(MatchClause),
    With(Projection),
    Unwind(Unwind),
    Return(Projection),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub patterns: Vec<Pattern>,
    pub predicate: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub items: Vec<ProjectionItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionItem {
    pub expr: Expr,
    pub alias: Option<String>,
}

impl ProjectionItem {
    /// Column name: the alias, or the printed expression.
    pub fn name(&self) -> String {
        match &self.alias {
            Some(a) => a.clone(),
            None => self.expr.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Unwind {
    pub expr: Expr,
    pub variable: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderBy {
    pub expr: Expr,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub variable: Option<String>,
    pub shortest: bool,
    pub chain: Chain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub start: NodePattern,
    pub steps: Vec<(RelPattern, NodePattern)>,
}

impl Chain {
    /// Node patterns in order.
    pub fn nodes(&self) -> impl Iterator<Item = &NodePattern> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, n)| n))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePattern {
    pub variable: Option<String>,
    pub label: Option<NodeLabel>,
    pub properties: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelDirection {
    /// `-[]->`
    Outgoing,
    /// `<-[]-`
    Incoming,
    /// `-[]-`
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub variable: Option<String>,
    pub label: Option<EdgeLabel>,
    pub direction: RelDirection,
    /// Present for variable-length relationships (`*`, `*n`, `*n..m`, ...).
    pub range: Option<HopRange>,
    pub properties: Vec<(String, Literal)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HopRange {
    pub min: Option<u32>,
    pub max: Option<u32>,
}

/// Upper bound applied when a variable-length relationship omits one.
pub const DEFAULT_MAX_HOPS: u32 = 15;

impl HopRange {
    pub fn effective_min(&self) -> u32 {
        self.min.unwrap_or(1)
    }

    pub fn effective_max(&self) -> u32 {
        self.max.unwrap_or(DEFAULT_MAX_HOPS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Text(String),
    Integer(i64),
}

impl Literal {
    pub fn to_value(&self) -> PropertyValue {
        match self {
            Literal::Text(s) => PropertyValue::Text(s.clone()),
            Literal::Integer(i) => PropertyValue::Integer(*i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Literal),
    Variable(String),
    Property {
        variable: String,
        key: String,
    },
    Compare {
        op: CompareOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    /// `lhs =~ "pattern"`; the pattern is always a text literal.
    Regex {
        lhs: Box<Expr>,
        pattern: String,
    },
    /// Two or more conjuncts.
    And(Vec<Expr>),
    /// `count(expr)`, or `count(*)` when `None`.
    Count(Option<Box<Expr>>),
    Nodes(Box<Expr>),
}

impl Expr {
    pub fn contains_aggregate(&self) -> bool {
        match self {
            Expr::Count(_) => true,
            Expr::Literal(_) | Expr::Variable(_) | Expr::Property { .. } => false,
            Expr::Compare { lhs, rhs, .. } => lhs.contains_aggregate() || rhs.contains_aggregate(),
            Expr::Regex { lhs, .. } => lhs.contains_aggregate(),
            Expr::And(parts) => parts.iter().any(Expr::contains_aggregate),
            Expr::Nodes(inner) => inner.contains_aggregate(),
        }
    }

    /// Variables referenced, in order of first appearance.
    pub fn variables(&self) -> Vec<&str> {
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a str>) {
            match e {
                Expr::Variable(v) | Expr::Property { variable: v, .. } => {
                    if !out.contains(&v.as_str()) {
                        out.push(v);
                    }
                }
                Expr::Literal(_) | Expr::Count(None) => {}
                Expr::Compare { lhs, rhs, .. } => {
                    walk(lhs, out);
                    walk(rhs, out);
                }
                Expr::Regex { lhs, .. } => walk(lhs, out),
                Expr::And(parts) => parts.iter().for_each(|p| walk(p, out)),
                Expr::Count(Some(inner)) | Expr::Nodes(inner) => walk(inner, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Top-level conjuncts.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        match self {
            Expr::And(parts) => parts.iter().collect(),
            other => vec![other],
        }
    }
}

// ---- printing ----

fn write_str_literal(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    // same escape set the lexer understands
    write!(f, "{}", PropertyValue::Text(s.to_owned()))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => write_str_literal(f, s),
            Literal::Integer(i) => write!(f, "{i}"),
        }
    }
}

fn write_props(f: &mut fmt::Formatter<'_>, props: &[(String, Literal)]) -> fmt::Result {
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

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        if let Some(v) = &self.variable {
            f.write_str(v)?;
        }
        if let Some(l) = self.label {
            write!(f, ":{l}")?;
        }
        write_props(f, &self.properties)?;
        f.write_str(")")
    }
}

impl fmt::Display for RelPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.direction == RelDirection::Incoming { "<-[" } else { "-[" })?;
        if let Some(v) = &self.variable {
            f.write_str(v)?;
        }
        if let Some(l) = self.label {
            write!(f, ":{l}")?;
        }
        if let Some(r) = &self.range {
            f.write_str("*")?;
            match (r.min, r.max) {
                (None, None) => {}
                (min, max) => {
                    if let Some(m) = min {
                        write!(f, "{m}")?;
                    }
                    f.write_str("..")?;
                    if let Some(m) = max {
                        write!(f, "{m}")?;
                    }
                }
            }
        }
        write_props(f, &self.properties)?;
        f.write_str(if self.direction == RelDirection::Outgoing { "]->" } else { "]-" })
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for (rel, node) in &self.steps {
            write!(f, "{rel}{node}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = &self.variable {
            write!(f, "{v} = ")?;
        }
        if self.shortest {
            write!(f, "shortestPath({})", self.chain)
        } else {
            write!(f, "{}", self.chain)
        }
    }
}

impl Expr {
    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Compare { .. } | Expr::Regex { .. } | Expr::And(_) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(l) => write!(f, "{l}"),
            Expr::Variable(v) => f.write_str(v),
            Expr::Property { variable, key } => write!(f, "{variable}.{key}"),
            Expr::Compare { op, lhs, rhs } => {
                lhs.fmt_operand(f)?;
                write!(f, " {} ", op.symbol())?;
                rhs.fmt_operand(f)
            }
            Expr::Regex { lhs, pattern } => {
                lhs.fmt_operand(f)?;
                f.write_str(" =~ ")?;
                write_str_literal(f, pattern)
            }
            Expr::And(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" AND ")?;
                    }
                    match p {
                        Expr::And(_) => write!(f, "({p})")?,
                        _ => write!(f, "{p}")?,
                    }
                }
                Ok(())
            }
            Expr::Count(None) => f.write_str("count(*)"),
            Expr::Count(Some(inner)) => write!(f, "count({inner})"),
            Expr::Nodes(inner) => write!(f, "nodes({inner})"),
        }
    }
}

impl fmt::Display for ProjectionItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)?;
        if let Some(a) = &self.alias {
            write!(f, " AS {a}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Match(m) => {
                f.write_str("MATCH ")?;
                for (i, p) in m.patterns.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                if let Some(w) = &m.predicate {
                    write!(f, " WHERE {w}")?;
                }
                Ok(())
            }
            Clause::With(p) => write!(f, "WITH {p}"),
            Clause::Unwind(u) => write!(f, "UNWIND {} AS {}", u.expr, u.variable),
            Clause::Return(p) => write!(f, "RETURN {p}"),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{c}")?;
        }
        if let Some(o) = &self.order_by {
            write!(f, "\nORDER BY {}", o.expr)?;
            if o.descending {
                f.write_str(" DESC")?;
            }
        }
        if let Some(l) = self.limit {
            write!(f, "\nLIMIT {l}")?;
        }
        Ok(())
    }
}
