//! Scope and shape checks shared by the planner and the reference executor.

use std::collections::HashMap;

use crate::ast::*;
use crate::error::QueryError;

/// What a variable is bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Node,
    Edge,
    /// Relationship variable of a variable-length pattern.
    EdgeList,
    Path,
    NodeList,
    Value,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Node => "node",
            Kind::Edge => "relationship",
            Kind::EdgeList => "relationship list",
            Kind::Path => "path",
            Kind::NodeList => "node list",
            Kind::Value => "value",
        }
    }
}

pub type Scope = HashMap<String, Kind>;

fn semantic(msg: impl Into<String>) -> QueryError {
    QueryError::Semantic(msg.into())
}

/// Static kind of an expression given the scope.
pub fn expr_kind(expr: &Expr, scope: &Scope) -> Kind {
    match expr {
        Expr::Variable(v) => scope.get(v).copied().unwrap_or(Kind::Value),
        Expr::Nodes(_) => Kind::NodeList,
        _ => Kind::Value,
    }
}

fn check_bound(expr: &Expr, scope: &Scope) -> Result<(), QueryError> {
    for v in expr.variables() {
        if !scope.contains_key(v) {
            return Err(QueryError::UnboundVariable(v.to_owned()));
        }
    }
    Ok(())
}

fn check_no_aggregate(expr: &Expr, place: &str) -> Result<(), QueryError> {
    if expr.contains_aggregate() {
        return Err(semantic(format!("aggregate functions are not allowed in {place}")));
    }
    Ok(())
}

fn bind(scope: &mut Scope, name: &str, kind: Kind) -> Result<(), QueryError> {
    match scope.get(name) {
        None => {
            scope.insert(name.to_owned(), kind);
            Ok(())
        }
        Some(Kind::Node) if kind == Kind::Node => Ok(()),
        Some(existing) => Err(semantic(format!(
            "variable `{name}` is already bound as a {} and cannot be rebound as a {}",
            existing.name(),
            kind.name()
        ))),
    }
}

fn check_match(m: &MatchClause, scope: &mut Scope) -> Result<(), QueryError> {
    for pattern in &m.patterns {
        let chain = &pattern.chain;
        for node in chain.nodes() {
            if let Some(v) = &node.variable {
                bind(scope, v, Kind::Node)?;
            }
        }
        for (rel, _) in &chain.steps {
            if let Some(v) = &rel.variable {
                if scope.contains_key(v) {
                    return Err(semantic(format!("relationship variable `{v}` is bound more than once")));
                }
                let kind = if rel.range.is_some() || pattern.shortest { Kind::EdgeList } else { Kind::Edge };
                scope.insert(v.clone(), kind);
            }
        }
        if let Some(v) = &pattern.variable {
            if scope.contains_key(v) {
                return Err(semantic(format!("path variable `{v}` is bound more than once")));
            }
            scope.insert(v.clone(), Kind::Path);
        }
    }
    if let Some(pred) = &m.predicate {
        check_no_aggregate(pred, "WHERE")?;
        check_bound(pred, scope)?;
    }
    Ok(())
}

/// Checks a WITH or RETURN projection and returns the scope it produces.
fn check_projection(p: &Projection, scope: &Scope, is_return: bool) -> Result<Scope, QueryError> {
    let mut out = Scope::new();
    for item in &p.items {
        check_bound(&item.expr, scope)?;
        match &item.expr {
            Expr::Count(Some(inner)) => check_no_aggregate(inner, "an aggregate argument")?,
            Expr::Count(None) => {}
            other => check_no_aggregate(other, "nested expressions")?,
        }
        if !is_return && item.alias.is_none() && !matches!(item.expr, Expr::Variable(_)) {
            return Err(semantic(format!("expression `{}` in WITH must be aliased", item.expr)));
        }
        let name = item.name();
        if out.contains_key(&name) {
            return Err(semantic(format!("column `{name}` is projected more than once")));
        }
        out.insert(name, expr_kind(&item.expr, scope));
    }
    Ok(out)
}

pub fn is_aggregating(p: &Projection) -> bool {
    p.items.iter().any(|i| i.expr.contains_aggregate())
}

/// Validates variable binding and clause shapes.
pub fn validate(query: &Query) -> Result<(), QueryError> {
    let mut scope = Scope::new();
    for clause in &query.clauses {
        match clause {
            Clause::Match(m) => check_match(m, &mut scope)?,
            Clause::With(p) => scope = check_projection(p, &scope, false)?,
            Clause::Unwind(u) => {
                check_no_aggregate(&u.expr, "UNWIND")?;
                check_bound(&u.expr, &scope)?;
                if scope.contains_key(&u.variable) {
                    return Err(semantic(format!("variable `{}` is already bound", u.variable)));
                }
                let kind = match expr_kind(&u.expr, &scope) {
                    Kind::NodeList => Kind::Node,
                    Kind::EdgeList => Kind::Edge,
                    _ => Kind::Value,
                };
                scope.insert(u.variable.clone(), kind);
            }
            Clause::Return(p) => {
                let outputs = check_projection(p, &scope, true)?;
                if let Some(order) = &query.order_by {
                    check_no_aggregate(&order.expr, "ORDER BY")?;
                    let printed = order.expr.to_string();
                    if !outputs.contains_key(&printed) {
                        let mut order_scope = if is_aggregating(p) { Scope::new() } else { scope.clone() };
                        order_scope.extend(outputs);
                        check_bound(&order.expr, &order_scope)?;
                    }
                }
            }
        }
    }
    Ok(())
}
