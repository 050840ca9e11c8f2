//! Brute-force reference executor.
//!
//! Binds pattern variables by nested iteration over the full node and edge
//! tables, with no adjacency lists, indexes or planning, then applies the
//! clauses one by one over environments keyed by variable name. It is slow
//! on purpose and exists to check the planner and executor.

use std::collections::HashMap;

use litgraph_core::{EdgeId, NodeId, Path, PropertyGraph, PropertyValue};
use regex::Regex;

use crate::ast::*;
use crate::error::QueryError;
use crate::validate::{is_aggregating, validate};
use crate::value::{tie_break_key, ResultTable, Value};

/// Node bindings explored before [`execute_reference`] gives up.
pub const DEFAULT_BUDGET: usize = 10_000;

pub fn execute_reference(query: &Query, graph: &PropertyGraph) -> Result<ResultTable, QueryError> {
    execute_reference_with(query, graph, DEFAULT_BUDGET)
}

/// Like [`execute_reference`] with a custom node-binding budget.
pub fn execute_reference_with(query: &Query, graph: &PropertyGraph, budget: usize) -> Result<ResultTable, QueryError> {
    validate(query)?;
    let mut regexes = HashMap::new();
    for clause in &query.clauses {
        collect_regexes(clause, &mut regexes)?;
    }
    if let Some(o) = &query.order_by {
        collect_expr_regexes(&o.expr, &mut regexes)?;
    }
    let mut r = Reference { graph, regexes, budget, explored: 0 };
    r.run(query)
}

type Env = HashMap<String, Value>;

struct Reference<'g> {
    graph: &'g PropertyGraph,
    regexes: HashMap<String, Regex>,
    budget: usize,
    explored: usize,
}

fn collect_regexes(clause: &Clause, out: &mut HashMap<String, Regex>) -> Result<(), QueryError> {
    match clause {
        Clause::Match(m) => m.predicate.iter().try_for_each(|p| collect_expr_regexes(p, out)),
        Clause::With(p) | Clause::Return(p) => p.items.iter().try_for_each(|i| collect_expr_regexes(&i.expr, out)),
        Clause::Unwind(u) => collect_expr_regexes(&u.expr, out),
    }
}

fn collect_expr_regexes(e: &Expr, out: &mut HashMap<String, Regex>) -> Result<(), QueryError> {
    match e {
        Expr::Regex { lhs, pattern } => {
            if !out.contains_key(pattern) {
                let re = Regex::new(&format!("^(?:{pattern})$"))
                    .map_err(|err| QueryError::Semantic(format!("invalid regular expression {pattern:?}: {err}")))?;
                out.insert(pattern.clone(), re);
            }
            collect_expr_regexes(lhs, out)
        }
        Expr::Compare { lhs, rhs, .. } => {
            collect_expr_regexes(lhs, out)?;
            collect_expr_regexes(rhs, out)
        }
        Expr::And(parts) => parts.iter().try_for_each(|p| collect_expr_regexes(p, out)),
        Expr::Count(Some(inner)) | Expr::Nodes(inner) => collect_expr_regexes(inner, out),
        Expr::Literal(_) | Expr::Variable(_) | Expr::Property { .. } | Expr::Count(None) => Ok(()),
    }
}

impl Reference<'_> {
    fn run(&mut self, query: &Query) -> Result<ResultTable, QueryError> {
        let mut envs: Vec<Env> = vec![Env::new()];
        for clause in &query.clauses {
            match clause {
                Clause::Match(m) => {
                    let mut next = Vec::new();
                    for env in &envs {
                        let mut matched = Vec::new();
                        self.patterns(&m.patterns, 0, &mut env.clone(), &mut Vec::new(), &mut matched)?;
                        for row in matched {
                            let keep = match &m.predicate {
                                Some(p) => self.eval(p, &row)? == Value::Scalar(PropertyValue::Boolean(true)),
                                None => true,
                            };
                            if keep {
                                next.push(row);
                            }
                        }
                    }
                    envs = next;
                }
                Clause::With(p) => {
                    envs = self.project(p, &envs)?.into_iter().map(|(out, _)| out).collect();
                }
                Clause::Unwind(u) => {
                    let mut next = Vec::new();
                    for env in envs {
                        let items = match self.eval(&u.expr, &env)? {
                            Value::List(items) => items,
                            v if v.is_null() => Vec::new(),
                            v => vec![v],
                        };
                        for item in items {
                            let mut e = env.clone();
                            e.insert(u.variable.clone(), item);
                            next.push(e);
                        }
                    }
                    envs = next;
                }
                Clause::Return(p) => return self.finish(p, query, &envs),
            }
        }
        unreachable!("validated query ends with RETURN")
    }

    /// Projects or aggregates; each output row is paired with the input row
    /// it came from (absent when aggregating).
    fn project(&mut self, p: &Projection, envs: &[Env]) -> Result<Vec<(Env, Option<Env>)>, QueryError> {
        let names: Vec<String> = p.items.iter().map(ProjectionItem::name).collect();
        if !is_aggregating(p) {
            let mut out = Vec::new();
            for env in envs {
                let mut row = Env::new();
                for (item, name) in p.items.iter().zip(&names) {
                    row.insert(name.clone(), self.eval(&item.expr, env)?);
                }
                out.push((row, Some(env.clone())));
            }
            return Ok(out);
        }
        // groups in first-seen order; linear search keeps this obviously right
        let mut groups: Vec<(Vec<Value>, Vec<&Env>)> = Vec::new();
        for env in envs {
            let mut key = Vec::new();
            for item in &p.items {
                if !item.expr.contains_aggregate() {
                    key.push(self.eval(&item.expr, env)?);
                }
            }
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(env),
                None => groups.push((key, vec![env])),
            }
        }
        if groups.is_empty() && p.items.iter().all(|i| i.expr.contains_aggregate()) {
            groups.push((Vec::new(), Vec::new()));
        }
        let mut out = Vec::new();
        for (key, members) in groups {
            let mut row = Env::new();
            let mut k = key.into_iter();
            for (item, name) in p.items.iter().zip(&names) {
                let v = match &item.expr {
                    Expr::Count(None) => Value::Scalar(PropertyValue::Integer(members.len() as i64)),
                    Expr::Count(Some(inner)) => {
                        let mut n = 0;
                        for m in &members {
                            if !self.eval(inner, m)?.is_null() {
                                n += 1;
                            }
                        }
                        Value::Scalar(PropertyValue::Integer(n))
                    }
                    _ => k.next().expect("key per grouping item"),
                };
                row.insert(name.clone(), v);
            }
            out.push((row, None));
        }
        Ok(out)
    }

    fn finish(&mut self, p: &Projection, query: &Query, envs: &[Env]) -> Result<ResultTable, QueryError> {
        let names: Vec<String> = p.items.iter().map(ProjectionItem::name).collect();
        let projected = self.project(p, envs)?;
        let mut rows: Vec<(Option<Value>, Vec<Value>)> = Vec::new();
        for (out, input) in projected {
            let key = match &query.order_by {
                None => None,
                Some(o) => {
                    let printed = o.expr.to_string();
                    Some(match out.get(&printed) {
                        Some(v) if names.contains(&printed) => v.clone(),
                        _ => {
                            let mut scope = input.unwrap_or_default();
                            scope.extend(out.iter().map(|(k, v)| (k.clone(), v.clone())));
                            self.eval(&o.expr, &scope)?
                        }
                    })
                }
            };
            rows.push((key, names.iter().map(|n| out[n].clone()).collect()));
        }
        if let Some(o) = &query.order_by {
            rows.sort_by(|a, b| {
                let primary = a.0.cmp(&b.0);
                let primary = if o.descending { primary.reverse() } else { primary };
                primary.then_with(|| tie_break_key(a.1.iter()).cmp(&tie_break_key(b.1.iter())))
            });
        }
        let mut table = ResultTable::new(names);
        table.rows = rows.into_iter().map(|(_, r)| r).collect();
        if let Some(l) = query.limit {
            table.rows.truncate(l as usize);
        }
        Ok(table)
    }

    // ---- pattern enumeration ----

    fn count_binding(&mut self) -> Result<(), QueryError> {
        self.explored += 1;
        if self.explored > self.budget {
            return Err(QueryError::OracleTooLarge(self.explored));
        }
        Ok(())
    }

    fn node_ok(&self, n: NodeId, pat: &NodePattern) -> bool {
        let node = self.graph.node(n).expect("ids come from the graph");
        if pat.label.is_some_and(|l| l != node.label()) {
            return false;
        }
        pat.properties.iter().all(|(k, v)| node.property(k).strict_eq(&v.to_value()) == Some(true))
    }

    fn edge_ok(&self, e: EdgeId, rel: &RelPattern) -> bool {
        let edge = self.graph.edge(e).expect("ids come from the graph");
        if rel.label.is_some_and(|l| l != edge.label()) {
            return false;
        }
        rel.properties.iter().all(|(k, v)| edge.property(k).strict_eq(&v.to_value()) == Some(true))
    }

    /// Far end of `e` when leaving `from` in the pattern's direction.
    fn traverse(&self, e: EdgeId, from: NodeId, dir: RelDirection) -> Option<NodeId> {
        let edge = self.graph.edge(e).expect("ids come from the graph");
        match dir {
            RelDirection::Outgoing => (edge.src() == from).then(|| edge.dst()),
            RelDirection::Incoming => (edge.dst() == from).then(|| edge.src()),
            RelDirection::Undirected => {
                if edge.src() == from {
                    Some(edge.dst())
                } else if edge.dst() == from {
                    Some(edge.src())
                } else {
                    None
                }
            }
        }
    }

    /// Candidate nodes for a pattern position given the environment.
    fn candidates(&mut self, pat: &NodePattern, env: &Env) -> Result<Vec<NodeId>, QueryError> {
        if let Some(v) = pat.variable.as_ref().and_then(|v| env.get(v)) {
            let Value::Node(n) = v else {
                return Err(QueryError::Semantic(format!("`{}` is not a node", pat.variable.as_ref().unwrap())));
            };
            return Ok(if self.node_ok(*n, pat) { vec![*n] } else { Vec::new() });
        }
        let all: Vec<NodeId> = self.graph.node_ids().collect();
        Ok(all.into_iter().filter(|n| self.node_ok(*n, pat)).collect())
    }

    fn patterns(
        &mut self,
        patterns: &[Pattern],
        idx: usize,
        env: &mut Env,
        used: &mut Vec<EdgeId>,
        out: &mut Vec<Env>,
    ) -> Result<(), QueryError> {
        let Some(pattern) = patterns.get(idx) else {
            out.push(env.clone());
            return Ok(());
        };
        if pattern.shortest {
            return self.shortest_pattern(patterns, idx, env, used, out);
        }
        for n in self.candidates(&pattern.chain.start, env)? {
            self.count_binding()?;
            let added = bind_node(env, &pattern.chain.start, n);
            self.steps(patterns, idx, 0, Path::single(n), env, used, out)?;
            if added {
                env.remove(pattern.chain.start.variable.as_ref().unwrap());
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn steps(
        &mut self,
        patterns: &[Pattern],
        idx: usize,
        step: usize,
        path: Path,
        env: &mut Env,
        used: &mut Vec<EdgeId>,
        out: &mut Vec<Env>,
    ) -> Result<(), QueryError> {
        let pattern = &patterns[idx];
        let Some((rel, next)) = pattern.chain.steps.get(step) else {
            let added = match &pattern.variable {
                Some(v) => {
                    env.insert(v.clone(), Value::Path(path));
                    Some(v)
                }
                None => None,
            };
            self.patterns(patterns, idx + 1, env, used, out)?;
            if let Some(v) = added {
                env.remove(v);
            }
            return Ok(());
        };
        let here = path.end();
        if rel.range.is_none() {
            let edges: Vec<EdgeId> = self.graph.edge_ids().collect();
            for e in edges {
                if used.contains(&e) || !self.edge_ok(e, rel) {
                    continue;
                }
                let Some(m) = self.traverse(e, here, rel.direction) else { continue };
                if !self.fits(next, m, env) {
                    continue;
                }
                self.count_binding()?;
                let added_node = bind_node(env, next, m);
                if let Some(v) = &rel.variable {
                    env.insert(v.clone(), Value::Edge(e));
                }
                used.push(e);
                let mut p = path.clone();
                p.push(e, m);
                self.steps(patterns, idx, step + 1, p, env, used, out)?;
                used.pop();
                if let Some(v) = &rel.variable {
                    env.remove(v);
                }
                if added_node {
                    env.remove(next.variable.as_ref().unwrap());
                }
            }
            return Ok(());
        }

        let range = rel.range.expect("checked above");
        let mut trails = Vec::new();
        self.trails(rel, range.effective_min(), range.effective_max(), &mut Path::single(here), used, &mut trails)?;
        for trail in trails {
            let m = trail.end();
            if !self.fits(next, m, env) {
                continue;
            }
            let added_node = bind_node(env, next, m);
            if let Some(v) = &rel.variable {
                env.insert(v.clone(), Value::List(trail.edges().iter().map(|e| Value::Edge(*e)).collect()));
            }
            let before = used.len();
            used.extend_from_slice(trail.edges());
            let mut p = path.clone();
            p.extend_with(&trail);
            self.steps(patterns, idx, step + 1, p, env, used, out)?;
            used.truncate(before);
            if let Some(v) = &rel.variable {
                env.remove(v);
            }
            if added_node {
                env.remove(next.variable.as_ref().unwrap());
            }
        }
        Ok(())
    }

    /// Whether node `m` can occupy pattern position `pat`.
    fn fits(&self, pat: &NodePattern, m: NodeId, env: &Env) -> bool {
        if let Some(bound) = pat.variable.as_ref().and_then(|v| env.get(v)) {
            if *bound != Value::Node(m) {
                return false;
            }
        }
        self.node_ok(m, pat)
    }

    /// All edge-unique trails from the end of `trail` whose total length lies
    /// in `min..=max`.
    #[allow(clippy::too_many_arguments)]
    fn trails(
        &mut self,
        rel: &RelPattern,
        min: u32,
        max: u32,
        trail: &mut Path,
        used: &[EdgeId],
        out: &mut Vec<Path>,
    ) -> Result<(), QueryError> {
        if trail.len() as u32 >= min {
            out.push(trail.clone());
        }
        if trail.len() as u32 >= max {
            return Ok(());
        }
        let here = trail.end();
        let edges: Vec<EdgeId> = self.graph.edge_ids().collect();
        for e in edges {
            if used.contains(&e) || trail.edges().contains(&e) || !self.edge_ok(e, rel) {
                continue;
            }
            let Some(m) = self.traverse(e, here, rel.direction) else { continue };
            self.count_binding()?;
            trail.push(e, m);
            self.trails(rel, min, max, trail, used, out)?;
            trail.pop();
        }
        Ok(())
    }

    fn shortest_pattern(
        &mut self,
        patterns: &[Pattern],
        idx: usize,
        env: &mut Env,
        used: &mut Vec<EdgeId>,
        out: &mut Vec<Env>,
    ) -> Result<(), QueryError> {
        let pattern = &patterns[idx];
        let (rel, end) = &pattern.chain.steps[0];
        let (min, max) = match rel.range {
            None => (1, 1),
            Some(r) => (r.effective_min(), r.effective_max()),
        };
        for a in self.candidates(&pattern.chain.start, env)? {
            self.count_binding()?;
            let added_a = bind_node(env, &pattern.chain.start, a);
            for b in self.candidates(end, env)? {
                self.count_binding()?;
                let added_b = bind_node(env, end, b);
                if let Some(path) = self.shortest(a, b, rel, max)? {
                    if path.len() as u32 >= min && !path.edges().iter().any(|e| used.contains(e)) {
                        if let Some(v) = &rel.variable {
                            env.insert(v.clone(), Value::List(path.edges().iter().map(|e| Value::Edge(*e)).collect()));
                        }
                        if let Some(v) = &pattern.variable {
                            env.insert(v.clone(), Value::Path(path.clone()));
                        }
                        let before = used.len();
                        used.extend_from_slice(path.edges());
                        self.patterns(patterns, idx + 1, env, used, out)?;
                        used.truncate(before);
                        for v in [&rel.variable, &pattern.variable].into_iter().flatten() {
                            env.remove(v);
                        }
                    }
                }
                if added_b {
                    env.remove(end.variable.as_ref().unwrap());
                }
            }
            if added_a {
                env.remove(pattern.chain.start.variable.as_ref().unwrap());
            }
        }
        Ok(())
    }

    /// Shortest trail from `a` to `b` by iterative deepening; among equally
    /// short trails the smallest sequence of (node, edge) steps wins.
    fn shortest(&mut self, a: NodeId, b: NodeId, rel: &RelPattern, max: u32) -> Result<Option<Path>, QueryError> {
        if a == b {
            return Ok(Some(Path::single(a)));
        }
        for len in 1..=max {
            let mut trails = Vec::new();
            self.trails(rel, len, len, &mut Path::single(a), &[], &mut trails)?;
            let best = trails
                .into_iter()
                .filter(|t| t.len() as u32 == len && t.end() == b)
                .min_by_key(|t| t.nodes()[1..].iter().copied().zip(t.edges().iter().copied()).collect::<Vec<_>>());
            if best.is_some() {
                return Ok(best);
            }
        }
        Ok(None)
    }

    // ---- expressions ----

    fn eval(&self, e: &Expr, env: &Env) -> Result<Value, QueryError> {
        let truth = |b: Option<bool>| Value::Scalar(b.map_or(PropertyValue::Null, PropertyValue::Boolean));
        match e {
            Expr::Literal(l) => Ok(Value::Scalar(l.to_value())),
            Expr::Variable(v) => env.get(v).cloned().ok_or_else(|| QueryError::UnboundVariable(v.clone())),
            Expr::Property { variable, key } => {
                let v = env.get(variable).ok_or_else(|| QueryError::UnboundVariable(variable.clone()))?;
                let props = match v {
                    Value::Node(n) => self.graph.node(*n).map(|n| n.property(key).clone()),
                    Value::Edge(x) => self.graph.edge(*x).map(|x| x.property(key).clone()),
                    v if v.is_null() => None,
                    v => return Err(QueryError::Eval(format!("cannot read `{key}` from a {}", v.kind_name()))),
                };
                Ok(Value::Scalar(props.unwrap_or(PropertyValue::Null)))
            }
            Expr::Compare { op, lhs, rhs } => {
                let (l, r) = (self.eval(lhs, env)?, self.eval(rhs, env)?);
                Ok(truth(three_valued(*op, &l, &r)))
            }
            Expr::Regex { lhs, pattern } => match self.eval(lhs, env)? {
                Value::Scalar(PropertyValue::Null) => Ok(Value::NULL),
                Value::Scalar(PropertyValue::Text(s)) => Ok(truth(Some(self.regexes[pattern].is_match(&s)))),
                v => Err(QueryError::Eval(format!("regex match on a {}", v.kind_name()))),
            },
            Expr::And(parts) => {
                let mut values = Vec::new();
                for p in parts {
                    values.push(match self.eval(p, env)? {
                        Value::Scalar(PropertyValue::Boolean(b)) => Some(b),
                        Value::Scalar(PropertyValue::Null) => None,
                        v => return Err(QueryError::Eval(format!("AND over a {}", v.kind_name()))),
                    });
                }
                Ok(truth(if values.contains(&Some(false)) {
                    Some(false)
                } else if values.contains(&None) {
                    None
                } else {
                    Some(true)
                }))
            }
            Expr::Nodes(inner) => match self.eval(inner, env)? {
                Value::Path(p) => Ok(Value::List(p.nodes().iter().map(|n| Value::Node(*n)).collect())),
                Value::Scalar(PropertyValue::Null) => Ok(Value::NULL),
                v => Err(QueryError::Eval(format!("nodes() of a {}", v.kind_name()))),
            },
            Expr::Count(_) => Err(QueryError::Semantic("aggregate outside a projection".into())),
        }
    }
}

fn bind_node(env: &mut Env, pat: &NodePattern, n: NodeId) -> bool {
    match &pat.variable {
        Some(v) if !env.contains_key(v) => {
            env.insert(v.clone(), Value::Node(n));
            true
        }
        _ => false,
    }
}

fn three_valued(op: CompareOp, l: &Value, r: &Value) -> Option<bool> {
    use std::cmp::Ordering::*;
    match (l, r) {
        (Value::Scalar(PropertyValue::Null), _) | (_, Value::Scalar(PropertyValue::Null)) => None,
        (Value::Scalar(a), Value::Scalar(b)) => {
            if op == CompareOp::Eq {
                return a.strict_eq(b);
            }
            let ord = a.compare(b)?;
            Some(match op {
                CompareOp::Lt => ord == Less,
                CompareOp::Le => ord == Less || ord == Equal,
                CompareOp::Gt => ord == Greater,
                CompareOp::Ge => ord == Greater || ord == Equal,
                CompareOp::Eq => unreachable!(),
            })
        }
        (a, b) if op == CompareOp::Eq => Some(a == b),
        _ => None,
    }
}
