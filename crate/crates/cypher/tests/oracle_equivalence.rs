//! The planned executor against the brute-force reference on random graphs
//! and random queries.

mod common;

use litgraph_cypher::validate::validate;
use litgraph_cypher::{execute_query, execute_reference_with, ExecOptions, QueryError, ResultTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BUDGET: usize = 5_000_000;

fn same_outcome(
    q: &litgraph_cypher::Query,
    fast: &Result<ResultTable, QueryError>,
    slow: &Result<ResultTable, QueryError>,
) -> bool {
    match (fast, slow) {
        (Ok(a), Ok(b)) if q.order_by.is_some() => a.columns == b.columns && a.rows == b.rows,
        (Ok(a), Ok(b)) => a.bag_eq(b),
        (Err(a), Err(b)) => std::mem::discriminant(a) == std::mem::discriminant(b),
        _ => false,
    }
}

#[test]
fn executor_matches_reference_on_random_inputs() {
    let mut nonempty = 0;
    for seed in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = common::random_graph(&mut rng, 40);
        let query = common::random_query(&mut rng);
        validate(&query).unwrap_or_else(|e| panic!("seed {seed}: generator produced an invalid query: {e}\n{query}"));
        let fast = execute_query(&query, &graph, ExecOptions::default());
        let slow = execute_reference_with(&query, &graph, BUDGET);
        assert!(
            !matches!(slow, Err(QueryError::OracleTooLarge(_))),
            "seed {seed}: reference exceeded its budget\n{query}"
        );
        assert!(same_outcome(&query, &fast, &slow), "seed {seed}:\n{query}\nexecute: {fast:?}\nreference: {slow:?}");
        if fast.as_ref().is_ok_and(|t| !t.is_empty()) {
            nonempty += 1;
        }
    }
    // guard against a generator that only ever produces empty results
    assert!(nonempty > 150, "only {nonempty} trials produced rows");
}

#[test]
fn executor_matches_reference_without_indexes() {
    let opts = ExecOptions { use_indexes: false, ..ExecOptions::default() };
    for seed in 1000..1100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = common::random_graph(&mut rng, 30);
        let query = common::random_query(&mut rng);
        let fast = execute_query(&query, &graph, opts);
        let slow = execute_reference_with(&query, &graph, BUDGET);
        assert!(same_outcome(&query, &fast, &slow), "seed {seed}:\n{query}\nexecute: {fast:?}\nreference: {slow:?}");
    }
}
