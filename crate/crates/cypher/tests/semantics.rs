//! Matching, filtering and projection rules, each checked on both executors.

mod common;

use std::time::Duration;

use litgraph_core::fixture::fixture_a;
use litgraph_core::{props, EdgeLabel, NodeLabel, PropertyGraph, PropertyValue};
use litgraph_cypher::{execute, execute_query, execute_reference, parse, ExecOptions, QueryError, ResultTable, Value};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn both(text: &str, g: &PropertyGraph) -> ResultTable {
    let fast = execute(text, g, ExecOptions::default()).unwrap();
    let slow = execute_reference(&parse(text).unwrap(), g).unwrap();
    assert!(fast.bag_eq(&slow), "{text}\nexecute: {fast:?}\nreference: {slow:?}");
    fast
}

fn int(v: &Value) -> i64 {
    match v {
        Value::Scalar(PropertyValue::Integer(i)) => *i,
        other => panic!("not an integer: {other:?}"),
    }
}

fn two_papers_one_citation() -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let a = g.add_node(NodeLabel::Paper, props! {}).unwrap();
    let b = g.add_node(NodeLabel::Paper, props! {}).unwrap();
    g.add_edge(a, EdgeLabel::Cites, b, props! {}).unwrap();
    g.sealed()
}

#[test]
fn a_relationship_binds_once_per_match() {
    let g = two_papers_one_citation();
    assert!(both("MATCH (a)-[r1:CITES]->(b)<-[r2:CITES]-(a) RETURN r1, r2", &g).is_empty());
    // separate MATCH clauses may reuse the edge
    assert_eq!(both("MATCH (a)-[r1:CITES]->(b) MATCH (b)<-[r2:CITES]-(a) RETURN r1, r2", &g).len(), 1);
    assert!(both("MATCH (a)-[:CITES]-(b)-[:CITES]-(c) RETURN c", &g).is_empty());
}

#[test]
fn variable_length_paths_never_repeat_an_edge() {
    let mut g = PropertyGraph::new();
    let a = g.add_node(NodeLabel::Paper, props! {}).unwrap();
    let b = g.add_node(NodeLabel::Paper, props! {}).unwrap();
    g.add_edge(a, EdgeLabel::Cites, b, props! {}).unwrap();
    g.add_edge(b, EdgeLabel::Cites, a, props! {}).unwrap();
    let g = g.sealed();
    // trails from each node: 1 hop, 2 hops (back home); never 3
    let t = both("MATCH p = (x)-[:CITES*1..5]->(y) RETURN p", &g);
    assert_eq!(t.len(), 4);
    let t = both("MATCH (x)-[:CITES*0..5]-(y) RETURN x, y", &g);
    // per start node: the empty trail, two 1-hop trails, two 2-hop trails
    assert_eq!(t.len(), 10);
}

#[test]
fn undirected_self_loop_matches_once() {
    let mut g = PropertyGraph::new();
    let a = g.add_node(NodeLabel::Paper, props! {}).unwrap();
    g.add_edge(a, EdgeLabel::Cites, a, props! {}).unwrap();
    let g = g.sealed();
    assert_eq!(both("MATCH (a)-[r]-(b) RETURN r", &g).len(), 1);
    assert_eq!(both("MATCH (a)-[r]->(b) RETURN r", &g).len(), 1);
    assert_eq!(both("MATCH (a)<-[r]-(b) RETURN r", &g).len(), 1);
}

#[test]
fn regex_matches_the_whole_string() {
    let (g, f) = fixture_a();
    assert!(both("MATCH (v:Venue) WHERE v.text =~ \"NAACL\" RETURN v", &g).is_empty());
    let t = both("MATCH (v:Venue) WHERE v.text =~ \".*NAACL.*\" RETURN v", &g);
    assert_eq!(t.rows, vec![vec![Value::Node(f.v1)]]);
    assert!(both("MATCH (e:Entity) WHERE e.name =~ \"relationship\" RETURN e", &g).is_empty());
    let t = both("MATCH (e:Entity) WHERE e.name =~ \"(?i).*EXTRACT.*\" RETURN e", &g);
    assert_eq!(t.rows, vec![vec![Value::Node(f.e1)]]);
}

#[test]
fn nulls_and_type_mismatches_filter_rows_out() {
    let (g, f) = fixture_a();
    let t = both("MATCH (a:Author) WHERE a.author_id > 0 RETURN a", &g);
    assert_eq!(t.rows, vec![vec![Value::Node(f.a1)]]);
    assert!(both("MATCH (a:Author) WHERE a.middle = a.middle RETURN a", &g).is_empty());
    assert!(both("MATCH (p:Paper {year: \"2017\"}) RETURN p", &g).is_empty());
    assert!(both("MATCH (p:Paper) WHERE p.year = \"2017\" RETURN p", &g).is_empty());
    assert!(both("MATCH (p:Paper) WHERE p.title < 3 RETURN p", &g).is_empty());
    // missing properties project as null
    let t = both("MATCH (a:Author {last: \"Ellis\"}) RETURN a.author_id", &g);
    assert_eq!(t.rows, vec![vec![Value::NULL]]);
}

#[test]
fn count_skips_nulls_and_keyless_aggregation_yields_one_row() {
    let (g, _) = fixture_a();
    let t = both("MATCH (a:Author) RETURN count(a.author_id) AS ids, count(*) AS all", &g);
    assert_eq!((int(&t.rows[0][0]), int(&t.rows[0][1])), (1, 4));
    let t = both("MATCH (v:Venue {text: \"ICML\"}) RETURN count(v)", &g);
    assert_eq!(t.rows, vec![vec![Value::Scalar(0.into())]]);
    let t = both("MATCH (v:Venue {text: \"ICML\"}) RETURN v, count(*)", &g);
    assert!(t.is_empty());
}

#[test]
fn group_counts_sum_to_the_ungrouped_row_count() {
    let (g, _) = fixture_a();
    let rows = both("MATCH (a:Author)-[:AUTHORS]->(p)-[:MENTIONS]->(e) RETURN a, p, e", &g).len() as i64;
    let grouped = both("MATCH (a:Author)-[:AUTHORS]->(p)-[:MENTIONS]->(e) RETURN a, count(*) AS c", &g);
    assert_eq!(grouped.rows.iter().map(|r| int(&r[1])).sum::<i64>(), rows);

    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, 30);
        let total = both("MATCH (a)-[r]->(b) RETURN a, r, b", &g).len() as i64;
        let by_label = both("MATCH (a)-[r]->(b) WITH b, count(r) AS c RETURN b, c", &g);
        assert_eq!(by_label.rows.iter().map(|r| int(&r[1])).sum::<i64>(), total, "seed {seed}");
    }
}

#[test]
fn limit_returns_a_prefix_of_the_ordered_result() {
    let (g, _) = fixture_a();
    let base = "MATCH (a:Author)-[:AUTHORS]->(p:Paper) RETURN a, p ORDER BY p.year DESC";
    let full = both(base, &g);
    for k in 0..=full.len() + 1 {
        let limited = execute(&format!("{base} LIMIT {k}"), &g, ExecOptions::default()).unwrap();
        assert_eq!(limited.rows[..], full.rows[..k.min(full.len())]);
    }

    let mut checked = 0;
    for seed in 0..400u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_graph(&mut rng, 30);
        let mut q = common::random_query(&mut rng);
        if q.order_by.is_none() {
            continue;
        }
        q.limit = None;
        let full = execute_query(&q, &g, ExecOptions::default()).unwrap();
        for k in [0, 1, 3, full.len()] {
            q.limit = Some(k as u64);
            let limited = execute_query(&q, &g, ExecOptions::default()).unwrap();
            assert_eq!(limited.rows[..], full.rows[..k.min(full.len())], "seed {seed}\n{q}");
        }
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn order_by_breaks_ties_by_first_node_id() {
    let (g, f) = fixture_a();
    let t = both("MATCH (a:Author) RETURN a, 1 AS one ORDER BY one", &g);
    let got: Vec<_> = t.rows.iter().map(|r| r[0].as_node().unwrap()).collect();
    assert_eq!(got, vec![f.a1, f.a2, f.a3, f.a4]);
    let t = both("MATCH (a:Author) RETURN a.last ORDER BY a.last DESC", &g);
    let got: Vec<String> = t.rows.iter().map(|r| r[0].canonical()).collect();
    assert_eq!(got, ["\"Zettlemoyer\"", "\"Swayamdipta\"", "\"Ellis\"", "\"Barzilay\""]);
}

#[test]
fn unwind_fans_out_path_nodes() {
    let (g, f) = fixture_a();
    let text = "MATCH p = (a:Author {last: \"Ellis\"})-[:AUTHORS]->(x) WITH nodes(p) AS ns UNWIND ns AS n RETURN n";
    let t = both(text, &g);
    assert_eq!(t.rows, vec![vec![Value::Node(f.a4)], vec![Value::Node(f.p3)]]);
}

#[test]
fn shortest_path_respects_hop_bounds() {
    let (g, f) = fixture_a();
    let q = |range: &str| {
        format!(
            "MATCH p = shortestPath((a:Author {{last: \"Swayamdipta\"}})-[:AUTHORS{range}]-(b:Author {{last: \"Barzilay\"}})) RETURN p"
        )
    };
    assert!(both(&q("*0..3"), &g).is_empty());
    assert_eq!(both(&q("*0..4"), &g).len(), 1);
    let same = both(
        "MATCH p = shortestPath((a:Author {last: \"Ellis\"})-[:AUTHORS*0..6]-(b:Author {last: \"Ellis\"})) RETURN p",
        &g,
    );
    let Value::Path(p) = &same.rows[0][0] else { panic!() };
    assert_eq!(p.nodes(), &[f.a4]);
}

#[test]
fn unbounded_variable_length_is_capped_with_a_warning() {
    let (g, _) = fixture_a();
    let t = execute("MATCH (a)-[:CITES*]->(b) RETURN b", &g, ExecOptions::default()).unwrap();
    assert_eq!(t.len(), 1);
    assert!(!t.warnings.is_empty());
}

#[test]
fn error_kinds() {
    let (g, _) = fixture_a();
    let run = |text: &str| execute(text, &g, ExecOptions::default());
    assert!(matches!(run("RETURN a MATCH (b)"), Err(QueryError::Parse(_))));
    assert!(matches!(run("MATCH (a:Journal) RETURN a"), Err(QueryError::Parse(_))));
    assert!(matches!(run("MATCH (a) RETURN b"), Err(QueryError::UnboundVariable(_))));
    assert!(matches!(run("MATCH (p:Paper) WHERE p.year =~ \"20.*\" RETURN p"), Err(QueryError::Eval(_))));
    assert!(matches!(run("MATCH (p:Paper) WHERE p.title =~ \"(\" RETURN p"), Err(QueryError::Semantic(_))));
    let e = parse("MATCH (a:Author) RETURN a LIMIT").unwrap_err();
    assert_eq!(e.offset, 31);
}

#[test]
fn row_cap_returns_the_first_rows() {
    let (g, _) = fixture_a();
    let opts = ExecOptions { max_rows: 2, ..ExecOptions::default() };
    match execute("MATCH (a:Author) RETURN a ORDER BY a.last", &g, opts) {
        Err(QueryError::RowLimitExceeded(partial)) => {
            let full =
                execute("MATCH (a:Author) RETURN a ORDER BY a.last LIMIT 2", &g, ExecOptions::default()).unwrap();
            assert_eq!(partial.rows, full.rows);
        }
        other => panic!("{other:?}"),
    }
    let exactly = ExecOptions { max_rows: 4, ..ExecOptions::default() };
    assert_eq!(execute("MATCH (a:Author) RETURN a", &g, exactly).unwrap().len(), 4);
}

#[test]
fn long_queries_time_out() {
    let mut g = PropertyGraph::new();
    let papers: Vec<_> = (0..60).map(|_| g.add_node(NodeLabel::Paper, props! {}).unwrap()).collect();
    for (i, &a) in papers.iter().enumerate() {
        for &b in &papers[i + 1..] {
            g.add_edge(a, EdgeLabel::Cites, b, props! {}).unwrap();
        }
    }
    let g = g.sealed();
    let opts = ExecOptions { timeout: Some(Duration::from_millis(50)), ..ExecOptions::default() };
    let started = std::time::Instant::now();
    let r = execute("MATCH (a)-[:CITES*1..15]-(b) RETURN count(*)", &g, opts);
    assert!(matches!(r, Err(QueryError::Timeout)), "{r:?}");
    assert!(started.elapsed() < Duration::from_secs(2));
}

#[test]
fn empty_graph_matches_nothing() {
    let g = PropertyGraph::new().sealed();
    assert!(both("MATCH (a)-[r]->(b) RETURN a, r, b", &g).is_empty());
    assert!(both("MATCH p = shortestPath((a)-[*0..3]-(b)) RETURN p", &g).is_empty());
}
