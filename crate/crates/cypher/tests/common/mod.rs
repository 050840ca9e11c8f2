//! Random graphs and random queries drawn from the supported grammar.
//!
//! Shared by the oracle-equivalence and round-trip suites; the acceptance
//! target includes this file too.

#![allow(dead_code)]

use litgraph_core::schema::DEFAULT_INDEXES;
use litgraph_core::{EdgeLabel, NodeLabel, PropertyGraph, PropertyMap, PropertyValue};
use litgraph_cypher::ast::*;
use rand::seq::SliceRandom;
use rand::Rng;

const NODE_WEIGHTS: &[(NodeLabel, u32)] = &[
    (NodeLabel::Paper, 4),
    (NodeLabel::Author, 3),
    (NodeLabel::Entity, 2),
    (NodeLabel::Venue, 1),
    (NodeLabel::Affiliation, 1),
    (NodeLabel::Relation, 1),
    (NodeLabel::RelationInstance, 1),
];

/// Text-valued properties per label with their value domains.
fn text_props(label: NodeLabel) -> &'static [(&'static str, &'static [&'static str])] {
    match label {
        NodeLabel::Paper => &[("title", &["T1", "T2", "Deep nets", "deep nets"])],
        NodeLabel::Author => &[("first", &["Ann", "Bo", "Cy"]), ("last", &["Lee", "Kim"])],
        NodeLabel::Entity => &[("name", &["Smoking", "Cancer", "NLP", "nlp parsing"])],
        NodeLabel::Venue => &[("text", &["NAACL 2018", "CVPR 2017", "ACL"])],
        NodeLabel::Affiliation => &[("text", &["UW", "MIT"])],
        NodeLabel::Relation => &[("name", &["Causes", "Treats"])],
        NodeLabel::RelationInstance => &[],
    }
}

/// Integer-valued properties per label with inclusive ranges.
fn int_props(label: NodeLabel) -> &'static [(&'static str, i64, i64)] {
    match label {
        NodeLabel::Paper => &[("year", 2010, 2020)],
        NodeLabel::Author => &[("author_id", 1, 5)],
        _ => &[],
    }
}

const ALL_TEXT_KEYS: &[&str] = &["title", "first", "last", "name", "text"];
const REGEXES: &[&str] = &[".*a.*", "(?i)nlp.*", "T1", "(?i)ann", ".*20.*", "[A-Z].*", "NAACL", ".*NAACL.*"];

/// Random sealed graph with at most `max_nodes` nodes. About half the
/// default indexes are created, so plans mix seeks and scans.
pub fn random_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    for (label, prop) in DEFAULT_INDEXES {
        if rng.gen_bool(0.5) {
            g.create_index(*label, prop).unwrap();
        }
    }
    let n = if rng.gen_bool(0.1) { rng.gen_range(0..=max_nodes) } else { rng.gen_range(max_nodes / 2..=max_nodes) };
    for _ in 0..n {
        let label = NODE_WEIGHTS.choose_weighted(rng, |(_, w)| *w).unwrap().0;
        let mut props = PropertyMap::new();
        for (key, domain) in text_props(label) {
            if rng.gen_bool(0.8) {
                props.insert((*key).into(), PropertyValue::from(*domain.choose(rng).unwrap()));
            }
        }
        for (key, lo, hi) in int_props(label) {
            if rng.gen_bool(0.8) {
                let v = rng.gen_range(*lo..=*hi);
                // occasionally stored as text to exercise type strictness
                let v = if rng.gen_bool(0.05) { PropertyValue::Text(v.to_string()) } else { PropertyValue::Integer(v) };
                props.insert((*key).into(), v);
            }
        }
        g.add_node(label, props).unwrap();
    }
    let ids: Vec<_> = g.node_ids().collect();
    if !ids.is_empty() {
        for _ in 0..rng.gen_range(n..=3 * n) {
            let label = *EdgeLabel::ALL.choose(rng).unwrap();
            let (sl, dl) = label.signature();
            let srcs = g.nodes_with_label(sl).to_vec();
            let dsts = g.nodes_with_label(dl).to_vec();
            let (Some(&s), Some(&d)) = (srcs.choose(rng), dsts.choose(rng)) else { continue };
            let mut props = PropertyMap::new();
            if label == EdgeLabel::WithEntity && rng.gen_bool(0.9) {
                props.insert("position".into(), PropertyValue::Integer(rng.gen_range(0..=1)));
            }
            g.add_edge(s, label, d, props).unwrap();
        }
    }
    g.seal();
    g
}

fn random_literal_for<R: Rng>(rng: &mut R, label: Option<NodeLabel>, key: &str) -> Literal {
    for l in label.into_iter().chain(NodeLabel::ALL) {
        if let Some((_, domain)) = text_props(l).iter().find(|(k, _)| *k == key) {
            return Literal::Text((*domain.choose(rng).unwrap()).into());
        }
        if let Some((_, lo, hi)) = int_props(l).iter().find(|(k, _, _)| *k == key) {
            return Literal::Integer(rng.gen_range(*lo - 1..=*hi + 1));
        }
    }
    if key == "position" {
        return Literal::Integer(rng.gen_range(0..=1));
    }
    Literal::Text("x".into())
}

/// Property key likely to exist on a node of `label`.
fn random_key<R: Rng>(rng: &mut R, label: Option<NodeLabel>) -> &'static str {
    let label = label.unwrap_or_else(|| *NodeLabel::ALL.choose(rng).unwrap());
    let mut keys: Vec<&'static str> = text_props(label).iter().map(|(k, _)| *k).collect();
    keys.extend(int_props(label).iter().map(|(k, _, _)| *k));
    keys.choose(rng).copied().unwrap_or("name")
}

fn random_text_key<R: Rng>(rng: &mut R, label: Option<NodeLabel>) -> &'static str {
    match label.map(text_props) {
        Some(props) if !props.is_empty() => props.choose(rng).unwrap().0,
        _ => ALL_TEXT_KEYS.choose(rng).unwrap(),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum VarKind {
    Node(Option<NodeLabel>),
    Edge,
    EdgeList,
    Path,
    NodeList,
    Value,
}

struct QueryGen<'r, R> {
    rng: &'r mut R,
    next: usize,
    scope: Vec<(String, VarKind)>,
}

/// Random query that passes validation.
pub fn random_query<R: Rng>(rng: &mut R) -> Query {
    QueryGen { rng, next: 0, scope: Vec::new() }.query()
}

impl<R: Rng> QueryGen<'_, R> {
    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn vars_where(&self, f: impl Fn(VarKind) -> bool) -> Vec<(String, VarKind)> {
        self.scope.iter().filter(|(_, k)| f(*k)).cloned().collect()
    }

    fn node_vars(&self) -> Vec<(String, Option<NodeLabel>)> {
        self.scope
            .iter()
            .filter_map(|(n, k)| match k {
                VarKind::Node(l) => Some((n.clone(), *l)),
                _ => None,
            })
            .collect()
    }

    fn bind(&mut self, name: &str, kind: VarKind) {
        if !self.scope.iter().any(|(n, _)| n == name) {
            self.scope.push((name.to_owned(), kind));
        }
    }

    fn query(mut self) -> Query {
        let mut clauses = vec![Clause::Match(self.match_clause(true))];
        if self.rng.gen_bool(0.2) {
            clauses.push(Clause::Match(self.match_clause(false)));
        }
        if self.rng.gen_bool(0.35) {
            self.with_part(&mut clauses);
            if !self.node_vars().is_empty() && self.rng.gen_bool(0.6) {
                clauses.push(Clause::Match(self.match_clause(false)));
            }
        }
        let pre_scope = self.scope.clone();
        let (ret, aggregating) = self.return_items();
        let mut order_by = None;
        let mut limit = None;
        if self.rng.gen_bool(0.4) {
            let expr = if !aggregating && self.rng.gen_bool(0.3) {
                let nodes: Vec<_> = pre_scope
                    .iter()
                    .filter_map(|(n, k)| match k {
                        VarKind::Node(l) => Some((n.clone(), *l)),
                        _ => None,
                    })
                    .collect();
                match nodes.choose(self.rng) {
                    Some((v, l)) => Some(Expr::Property { variable: v.clone(), key: random_key(self.rng, *l).into() }),
                    None => None,
                }
            } else {
                // an unaliased aggregate column cannot be named in ORDER BY
                let usable: Vec<&ProjectionItem> =
                    ret.items.iter().filter(|i| i.alias.is_some() || !i.expr.contains_aggregate()).collect();
                usable.choose(self.rng).map(|item| match &item.alias {
                    Some(a) => Expr::Variable(a.clone()),
                    None => item.expr.clone(),
                })
            };
            if let Some(expr) = expr {
                order_by = Some(OrderBy { expr, descending: self.rng.gen_bool(0.5) });
                if self.rng.gen_bool(0.5) {
                    limit = Some(self.rng.gen_range(0..6));
                }
            }
        }
        clauses.push(Clause::Return(ret));
        Query { clauses, order_by, limit }
    }

    fn match_clause(&mut self, first: bool) -> MatchClause {
        let n = if self.rng.gen_bool(0.3) { 2 } else { 1 };
        let mut patterns = Vec::new();
        for i in 0..n {
            let force_named = first && i == 0;
            let pattern = if self.rng.gen_bool(0.15) {
                self.shortest_pattern(force_named)
            } else {
                self.chain_pattern(force_named)
            };
            patterns.push(pattern);
        }
        let predicate = if self.rng.gen_bool(0.4) { self.predicate() } else { None };
        MatchClause { patterns, predicate }
    }

    /// Label a node pattern ends up with, falling back to what the scope knows.
    fn known_label(&self, node: &NodePattern) -> Option<NodeLabel> {
        node.label.or_else(|| {
            let v = node.variable.as_ref()?;
            self.node_vars().into_iter().find(|(n, _)| n == v).and_then(|(_, l)| l)
        })
    }

    fn node_pattern(&mut self, want: Option<NodeLabel>, force_named: bool) -> NodePattern {
        let compatible: Vec<(String, Option<NodeLabel>)> =
            self.node_vars().into_iter().filter(|(_, l)| l.is_none() || want.is_none() || *l == want).collect();
        if !force_named && !compatible.is_empty() && self.rng.gen_bool(0.2) {
            let (v, l) = compatible.choose(self.rng).unwrap().clone();
            let label = if self.rng.gen_bool(0.5) { l } else { None };
            return NodePattern { variable: Some(v), label, properties: vec![] };
        }
        let variable = if force_named || self.rng.gen_bool(0.85) { Some(self.fresh("n")) } else { None };
        let label = match want {
            Some(l) if self.rng.gen_bool(0.85) => Some(l),
            Some(_) => None,
            None if self.rng.gen_bool(0.6) => Some(*NodeLabel::ALL.choose(self.rng).unwrap()),
            None => None,
        };
        let mut properties = Vec::new();
        if self.rng.gen_bool(0.2) {
            let key = random_key(self.rng, label);
            properties.push((key.to_owned(), random_literal_for(self.rng, label, key)));
        }
        if let Some(v) = &variable {
            self.bind(v, VarKind::Node(label));
        }
        NodePattern { variable, label, properties }
    }

    /// A relationship leaving a node labelled `from`, usually one the schema
    /// allows. Returns the label expected at the far end.
    fn rel_pattern(
        &mut self,
        from: Option<NodeLabel>,
        var_length: bool,
        list_kind: bool,
    ) -> (RelPattern, Option<NodeLabel>) {
        use RelDirection::*;
        let fitting: Vec<EdgeLabel> = match from {
            Some(f) => EdgeLabel::ALL
                .into_iter()
                .filter(|l| {
                    let (s, d) = l.signature();
                    s == f || d == f
                })
                .collect(),
            None => EdgeLabel::ALL.to_vec(),
        };
        let (label, direction, to) = if !fitting.is_empty() && self.rng.gen_bool(0.8) {
            let label = *fitting.choose(self.rng).unwrap();
            let (s, d) = label.signature();
            let forward = match from {
                Some(f) if s == f && d == f => self.rng.gen_bool(0.5),
                Some(f) => s == f,
                None => self.rng.gen_bool(0.5),
            };
            let direction = if self.rng.gen_bool(0.3) {
                Undirected
            } else if forward {
                Outgoing
            } else {
                Incoming
            };
            (Some(label), direction, Some(if forward { d } else { s }))
        } else {
            let label = if self.rng.gen_bool(0.5) { Some(*EdgeLabel::ALL.choose(self.rng).unwrap()) } else { None };
            (label, *[Outgoing, Incoming, Undirected].choose(self.rng).unwrap(), None)
        };
        let range = var_length.then(|| {
            *[
                HopRange { min: Some(0), max: Some(2) },
                HopRange { min: Some(1), max: Some(2) },
                HopRange { min: Some(1), max: Some(3) },
                HopRange { min: Some(2), max: Some(2) },
                HopRange { min: None, max: Some(2) },
                HopRange { min: Some(0), max: Some(1) },
            ]
            .choose(self.rng)
            .unwrap()
        });
        let variable = if self.rng.gen_bool(0.4) {
            let v = self.fresh("r");
            self.bind(&v, if list_kind || range.is_some() { VarKind::EdgeList } else { VarKind::Edge });
            Some(v)
        } else {
            None
        };
        let mut properties = Vec::new();
        if label == Some(EdgeLabel::WithEntity) && self.rng.gen_bool(0.3) {
            properties.push(("position".to_owned(), Literal::Integer(self.rng.gen_range(0..=1))));
        }
        (RelPattern { variable, label, direction, range, properties }, to)
    }

    fn chain_pattern(&mut self, force_named: bool) -> Pattern {
        let steps = *[0usize, 1, 1, 1, 2, 2].choose(self.rng).unwrap();
        let start = self.node_pattern(None, force_named);
        let mut current = self.known_label(&start);
        let mut chain_steps = Vec::new();
        for _ in 0..steps {
            let var_length = self.rng.gen_bool(0.2);
            let (rel, want) = self.rel_pattern(current, var_length, false);
            let node = self.node_pattern(want, false);
            current = self.known_label(&node);
            chain_steps.push((rel, node));
        }
        let variable = if self.rng.gen_bool(0.2) { Some(self.fresh("p")) } else { None };
        if let Some(v) = &variable {
            self.bind(v, VarKind::Path);
        }
        Pattern { variable, shortest: false, chain: Chain { start, steps: chain_steps } }
    }

    fn shortest_pattern(&mut self, force_named: bool) -> Pattern {
        let fresh_start = force_named || self.rng.gen_bool(0.7);
        let a = self.node_pattern(None, fresh_start);
        let from = self.known_label(&a);
        let (mut rel, want) = self.rel_pattern(from, false, true);
        rel.range = *[
            None,
            Some(HopRange { min: Some(0), max: Some(4) }),
            Some(HopRange { min: Some(1), max: Some(3) }),
            Some(HopRange { min: Some(2), max: Some(4) }),
            Some(HopRange { min: None, max: Some(2) }),
        ]
        .choose(self.rng)
        .unwrap();
        // undirected walks over a label can come back to the same label
        let want = if rel.direction == RelDirection::Undirected && self.rng.gen_bool(0.5) { from } else { want };
        let b = self.node_pattern(want, false);
        let variable = if self.rng.gen_bool(0.7) { Some(self.fresh("p")) } else { None };
        if let Some(v) = &variable {
            self.bind(v, VarKind::Path);
        }
        Pattern { variable, shortest: true, chain: Chain { start: a, steps: vec![(rel, b)] } }
    }

    fn predicate(&mut self) -> Option<Expr> {
        let n = self.rng.gen_range(1..=2);
        let mut parts: Vec<Expr> = (0..n).filter_map(|_| self.conjunct()).collect();
        if parts.len() >= 2 && self.rng.gen_bool(0.1) {
            let inner = Expr::And(parts.split_off(parts.len() - 2));
            parts.push(inner);
        }
        match parts.len() {
            0 => None,
            1 => parts.pop(),
            _ => Some(Expr::And(parts)),
        }
    }

    fn conjunct(&mut self) -> Option<Expr> {
        let nodes = self.node_vars();
        let edges: Vec<String> = self.vars_where(|k| k == VarKind::Edge).into_iter().map(|(n, _)| n).collect();
        let op = *[CompareOp::Eq, CompareOp::Lt, CompareOp::Gt, CompareOp::Le, CompareOp::Ge].choose(self.rng).unwrap();
        match self.rng.gen_range(0..10) {
            0..=3 if !nodes.is_empty() => {
                let (v, l) = nodes.choose(self.rng).unwrap().clone();
                let key = random_key(self.rng, l);
                let prop = Expr::Property { variable: v, key: key.into() };
                let lit = Expr::Literal(random_literal_for(self.rng, l, key));
                let (lhs, rhs) = if self.rng.gen_bool(0.8) { (prop, lit) } else { (lit, prop) };
                Some(Expr::Compare { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
            }
            4..=5 if !nodes.is_empty() => {
                let (v, l) = nodes.choose(self.rng).unwrap().clone();
                let key = random_text_key(self.rng, l);
                Some(Expr::Regex {
                    lhs: Box::new(Expr::Property { variable: v, key: key.into() }),
                    pattern: (*REGEXES.choose(self.rng).unwrap()).into(),
                })
            }
            6 if nodes.len() >= 2 => {
                let a = nodes.choose(self.rng).unwrap().0.clone();
                let b = nodes.choose(self.rng).unwrap().0.clone();
                Some(Expr::Compare {
                    op: CompareOp::Eq,
                    lhs: Box::new(Expr::Variable(a)),
                    rhs: Box::new(Expr::Variable(b)),
                })
            }
            7 if nodes.len() >= 2 => {
                let (a, la) = nodes.choose(self.rng).unwrap().clone();
                let (b, _) = nodes.choose(self.rng).unwrap().clone();
                let key = random_key(self.rng, la);
                Some(Expr::Compare {
                    op,
                    lhs: Box::new(Expr::Property { variable: a, key: key.into() }),
                    rhs: Box::new(Expr::Property { variable: b, key: key.into() }),
                })
            }
            8 if !edges.is_empty() => {
                let e = edges.choose(self.rng).unwrap().clone();
                Some(Expr::Compare {
                    op,
                    lhs: Box::new(Expr::Property { variable: e, key: "position".into() }),
                    rhs: Box::new(Expr::Literal(Literal::Integer(self.rng.gen_range(0..=1)))),
                })
            }
            _ => None,
        }
    }

    /// Appends a WITH (and possibly an UNWIND). Returns whether it aggregated.
    fn with_part(&mut self, clauses: &mut Vec<Clause>) -> bool {
        let paths: Vec<String> = self.vars_where(|k| k == VarKind::Path).into_iter().map(|(n, _)| n).collect();
        let lists: Vec<String> = self.vars_where(|k| k == VarKind::EdgeList).into_iter().map(|(n, _)| n).collect();
        let choice = self.rng.gen_range(0..10);
        if choice < 3 && !paths.is_empty() {
            let p = paths.choose(self.rng).unwrap().clone();
            let ns = self.fresh("ns");
            let mut items =
                vec![ProjectionItem { expr: Expr::Nodes(Box::new(Expr::Variable(p))), alias: Some(ns.clone()) }];
            let keep = self.node_vars();
            let mut new_scope = vec![(ns.clone(), VarKind::NodeList)];
            if let Some((v, l)) = keep.choose(self.rng).cloned() {
                if self.rng.gen_bool(0.5) {
                    items.push(ProjectionItem { expr: Expr::Variable(v.clone()), alias: None });
                    new_scope.push((v, VarKind::Node(l)));
                }
            }
            clauses.push(Clause::With(Projection { items }));
            self.scope = new_scope;
            let n = self.fresh("u");
            clauses.push(Clause::Unwind(Unwind { expr: Expr::Variable(ns), variable: n.clone() }));
            self.bind(&n, VarKind::Node(None));
            return false;
        }
        if choice < 4 && !lists.is_empty() {
            let r = lists.choose(self.rng).unwrap().clone();
            let mut items = vec![ProjectionItem { expr: Expr::Variable(r.clone()), alias: None }];
            let mut new_scope = vec![(r.clone(), VarKind::EdgeList)];
            if let Some((v, l)) = self.node_vars().choose(self.rng).cloned() {
                items.push(ProjectionItem { expr: Expr::Variable(v.clone()), alias: None });
                new_scope.push((v, VarKind::Node(l)));
            }
            clauses.push(Clause::With(Projection { items }));
            self.scope = new_scope;
            let e = self.fresh("e");
            clauses.push(Clause::Unwind(Unwind { expr: Expr::Variable(r), variable: e.clone() }));
            self.bind(&e, VarKind::Edge);
            return false;
        }
        if choice < 7 {
            // aggregate
            let keys: Vec<(String, VarKind)> = {
                let nodes = self.vars_where(|k| matches!(k, VarKind::Node(_)));
                let k = self.rng.gen_range(0..=nodes.len().min(2));
                nodes.choose_multiple(self.rng, k).cloned().collect()
            };
            let mut items: Vec<ProjectionItem> =
                keys.iter().map(|(v, _)| ProjectionItem { expr: Expr::Variable(v.clone()), alias: None }).collect();
            let c = self.fresh("c");
            items.push(ProjectionItem { expr: self.count_expr(), alias: Some(c.clone()) });
            clauses.push(Clause::With(Projection { items }));
            self.scope = keys;
            self.scope.push((c, VarKind::Value));
            return true;
        }
        // pass-through with renames
        let all = self.scope.clone();
        let k = self.rng.gen_range(1..=all.len());
        let kept: Vec<(String, VarKind)> = all.choose_multiple(self.rng, k).cloned().collect();
        let mut items = Vec::new();
        let mut new_scope = Vec::new();
        for (v, kind) in kept {
            let alias = if self.rng.gen_bool(0.3) { Some(self.fresh("w")) } else { None };
            new_scope.push((alias.clone().unwrap_or_else(|| v.clone()), kind));
            items.push(ProjectionItem { expr: Expr::Variable(v), alias });
        }
        clauses.push(Clause::With(Projection { items }));
        self.scope = new_scope;
        false
    }

    fn count_expr(&mut self) -> Expr {
        let candidates = self.scope.clone();
        match self.rng.gen_range(0..3) {
            0 => Expr::Count(None),
            1 if !candidates.is_empty() => {
                Expr::Count(Some(Box::new(Expr::Variable(candidates.choose(self.rng).unwrap().0.clone()))))
            }
            _ => match self.node_vars().choose(self.rng).cloned() {
                Some((v, l)) => {
                    Expr::Count(Some(Box::new(Expr::Property { variable: v, key: random_key(self.rng, l).into() })))
                }
                None => Expr::Count(None),
            },
        }
    }

    fn value_expr(&mut self) -> Expr {
        let (v, kind) = self.scope.choose(self.rng).unwrap().clone();
        match kind {
            VarKind::Node(l) if self.rng.gen_bool(0.4) => {
                Expr::Property { variable: v, key: random_key(self.rng, l).into() }
            }
            VarKind::Edge if self.rng.gen_bool(0.3) => Expr::Property { variable: v, key: "position".into() },
            VarKind::Path if self.rng.gen_bool(0.3) => Expr::Nodes(Box::new(Expr::Variable(v))),
            _ => Expr::Variable(v),
        }
    }

    fn return_items(&mut self) -> (Projection, bool) {
        let aggregating = self.rng.gen_bool(0.3);
        let n_keys = if aggregating { self.rng.gen_range(0..=2) } else { self.rng.gen_range(1..=3) };
        let mut items: Vec<ProjectionItem> = Vec::new();
        let mut names: Vec<String> = Vec::new();
        for _ in 0..n_keys {
            let expr = self.value_expr();
            let name = expr.to_string();
            if names.contains(&name) {
                continue;
            }
            let alias = if self.rng.gen_bool(0.2) { Some(self.fresh("o")) } else { None };
            names.push(alias.clone().unwrap_or(name));
            items.push(ProjectionItem { expr, alias });
        }
        if aggregating {
            let expr = self.count_expr();
            let alias =
                if self.rng.gen_bool(0.6) || names.contains(&expr.to_string()) { Some(self.fresh("k")) } else { None };
            items.push(ProjectionItem { expr, alias });
        }
        (Projection { items }, aggregating)
    }
}
