use std::sync::Arc;
use std::time::Duration;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use litgraph_core::fixture::fixture_a;
use litgraph_core::{props, EdgeLabel, NodeLabel, PropertyGraph, PropertyMap};
use litgraph_service::{bundled_examples, router, AppState, BuildInfo, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture_state(config: ServiceConfig) -> Arc<AppState> {
    let (g, _) = fixture_a();
    AppState::with_graph(
        config,
        bundled_examples(),
        g,
        BuildInfo { source: Some("fixture".into()), built_at_unix: Some(7) },
    )
}

async fn call(state: &Arc<AppState>, req: Request<Body>) -> (StatusCode, Value) {
    let resp = router(Arc::clone(state)).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn get(state: &Arc<AppState>, uri: &str) -> (StatusCode, Value) {
    call(state, Request::get(uri).body(Body::empty()).unwrap()).await
}

async fn query(state: &Arc<AppState>, body: Value) -> (StatusCode, Value) {
    let req =
        Request::post("/query").header("content-type", "application/json").body(Body::from(body.to_string())).unwrap();
    call(state, req).await
}

fn example(slug: &str) -> String {
    bundled_examples().into_iter().find(|e| e.slug == slug).unwrap().statement
}

#[tokio::test]
async fn authors_by_name_returns_one_author() {
    let state = fixture_state(ServiceConfig::default());
    let (status, body) = query(&state, json!({ "statement": example("authors-by-name") })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["columns"], json!(["a"]));
    assert_eq!(body["stats"]["row_count"], 1);
    assert_eq!(body["stats"]["truncated"], false);
    assert!(body["stats"]["elapsed_ms"].is_u64());
    let node = &body["rows"][0][0];
    assert_eq!(node["label"], "Author");
    assert_eq!(node["properties"], json!({"first": "Clarence", "last": "Ellis"}));
    let keys: Vec<&String> = body.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["columns", "rows", "stats"]);
}

#[tokio::test]
async fn envelope_keys_are_in_the_documented_order() {
    let state = fixture_state(ServiceConfig::default());
    let req = Request::post("/query")
        .body(Body::from(json!({"statement": "MATCH (a:Author) RETURN count(a) AS n"}).to_string()))
        .unwrap();
    let resp = router(state).oneshot(req).await.unwrap();
    let text = String::from_utf8(to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec()).unwrap();
    let elapsed = text.split("\"elapsed_ms\":").nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(
        text.replace(&format!("\"elapsed_ms\":{elapsed}"), "\"elapsed_ms\":0"),
        r#"{"columns":["n"],"rows":[[4]],"stats":{"row_count":1,"elapsed_ms":0,"truncated":false}}"#
    );
}

#[tokio::test]
async fn paths_serialize_as_id_sequences() {
    let state = fixture_state(ServiceConfig::default());
    let (status, body) = query(&state, json!({ "statement": example("shortest-path") })).await;
    assert_eq!(status, StatusCode::OK);
    let (_, f) = fixture_a();
    assert_eq!(body["rows"][0][0]["nodes"], json!([f.a1.0, f.p1.0, f.a2.0, f.p2.0, f.a3.0]));
    assert_eq!(body["rows"][0][0]["edges"].as_array().unwrap().len(), 4);
}

#[tokio::test]
async fn bad_requests() {
    let state = fixture_state(ServiceConfig::default());
    let (status, body) = query(&state, json!({ "statement": "" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].is_string());

    let (status, body) = query(&state, json!({ "statement": "MATCH (a:Author) RETURN a LIMIT" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["offset"], 31);

    let req = Request::post("/query").body(Body::from("{not json")).unwrap();
    assert_eq!(call(&state, req).await.0, StatusCode::BAD_REQUEST);

    let (status, _) = query(&state, json!({ "statement": "MATCH (a:Author) RETURN b" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn parameters_match_inlined_literals() {
    let state = fixture_state(ServiceConfig::default());
    let inlined = query(&state, json!({ "statement": example("experts") })).await;
    let templated = example("experts").replace("2013", "$year").replace("\"Relationship extraction\"", "$entity");
    let substituted = query(
        &state,
        json!({ "statement": templated, "parameters": { "year": 2013, "entity": "Relationship extraction" } }),
    )
    .await;
    assert_eq!(inlined.0, StatusCode::OK);
    assert_eq!(substituted.0, StatusCode::OK);
    assert_eq!(inlined.1["rows"], substituted.1["rows"]);
    assert_eq!(inlined.1["rows"].as_array().unwrap().len(), 3);
}

#[tokio::test]
async fn parameter_errors_are_unprocessable() {
    let state = fixture_state(ServiceConfig::default());
    let statement = "MATCH (a:Author) WHERE a.last = $last RETURN a";
    for params in [json!({}), json!({"last": "Ellis", "extra": 1}), json!({"last": 1.5})] {
        let (status, body) = query(&state, json!({ "statement": statement, "parameters": params })).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{params}");
        assert!(body["error"].is_string());
    }
    // a value cannot break out of its literal
    let (status, body) =
        query(&state, json!({ "statement": statement, "parameters": { "last": "x\" OR a.last = \"Ellis" } })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["stats"]["row_count"], 0);
}

#[tokio::test]
async fn row_cap_truncates_with_413() {
    let state = fixture_state(ServiceConfig { max_rows: 3, ..ServiceConfig::default() });
    let (status, body) = query(&state, json!({ "statement": "MATCH (e:Entity) RETURN e" })).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    assert_eq!(body["stats"]["truncated"], true);
    assert_eq!(body["stats"]["row_count"], 3);
    assert_eq!(body["rows"].as_array().unwrap().len(), 3);

    // exactly at the cap is not truncation
    let (status, body) = query(&state, json!({ "statement": "MATCH (p:Paper) RETURN p" })).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["stats"]["truncated"], false);

    // requests may lower the cap but not raise it
    let (status, body) = query(&state, json!({ "statement": "MATCH (p:Paper) RETURN p", "max_rows": 2 })).await;
    assert_eq!((status, body["stats"]["row_count"].clone()), (StatusCode::PAYLOAD_TOO_LARGE, json!(2)));
    let (status, _) = query(&state, json!({ "statement": "MATCH (e:Entity) RETURN e", "max_rows": 100 })).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
}

fn dense_citations(n: usize) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let ps: Vec<_> = (0..n).map(|i| g.add_node(NodeLabel::Paper, props! {"year" => i as i64}).unwrap()).collect();
    for &a in &ps {
        for &b in &ps {
            if a != b {
                g.add_edge(a, EdgeLabel::Cites, b, PropertyMap::new()).unwrap();
            }
        }
    }
    g.sealed()
}

#[tokio::test]
async fn slow_queries_time_out_with_408() {
    let config = ServiceConfig { max_rows: usize::MAX, timeout: Duration::from_millis(100) };
    let state = AppState::with_graph(config, bundled_examples(), dense_citations(60), BuildInfo::default());
    let statement = "MATCH (a:Paper)-[:CITES*1..6]->(b:Paper) RETURN count(b)";
    let started = std::time::Instant::now();
    let (status, body) = query(&state, json!({ "statement": statement, "timeout_ms": 60_000 })).await;
    assert_eq!(status, StatusCode::REQUEST_TIMEOUT);
    assert!(body["error"].is_string());
    assert!(started.elapsed() < Duration::from_secs(10));
}

#[tokio::test]
async fn examples_endpoints() {
    let state = fixture_state(ServiceConfig::default());
    let (status, list) = get(&state, "/examples").await;
    assert_eq!(status, StatusCode::OK);
    assert!(list.as_array().unwrap().len() >= 6);
    let (status, entry) = get(&state, "/examples/shortest-path").await;
    assert_eq!(status, StatusCode::OK);
    assert!(entry["statement"].as_str().unwrap().trim_start_matches(|c| c != 'M').starts_with("MATCH p=shortestPath"));
    for key in ["slug", "title", "statement", "description"] {
        assert!(entry[key].is_string(), "{key}");
    }
    assert_eq!(get(&state, "/examples/nope").await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn stats_mirror_graph_counts() {
    let state = fixture_state(ServiceConfig::default());
    let (status, stats) = get(&state, "/stats").await;
    assert_eq!(status, StatusCode::OK);
    let (g, _) = fixture_a();
    assert_eq!(stats["nodes"], serde_json::to_value(g.counts().nodes).unwrap());
    assert_eq!(stats["edges"], serde_json::to_value(g.counts().edges).unwrap());
    assert_eq!(stats["nodes"]["Author"], 4);
    assert_eq!(stats["nodes"]["Paper"], 3);
    assert_eq!(stats["edges"]["AUTHORS"], 5);
    assert_eq!(stats["build"]["built_at_unix"], 7);
    assert_eq!(stats["indexes"].as_array().unwrap().len(), 8);

    let empty = AppState::with_graph(ServiceConfig::default(), vec![], PropertyGraph::new(), BuildInfo::default());
    let (_, stats) = get(&empty, "/stats").await;
    assert_eq!(stats["total_nodes"], 0);
    assert!(stats["nodes"].as_object().unwrap().values().all(|v| v == 0));
}

#[tokio::test]
async fn health_reports_loading_then_ok() {
    let state = AppState::new(ServiceConfig::default(), bundled_examples());
    let (status, body) = get(&state, "/health").await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(body["status"], "loading");
    assert_eq!(
        query(&state, json!({"statement": "MATCH (a:Author) RETURN a"})).await.0,
        StatusCode::SERVICE_UNAVAILABLE
    );
    assert_eq!(get(&state, "/stats").await.0, StatusCode::SERVICE_UNAVAILABLE);
    // examples need no graph
    assert_eq!(get(&state, "/examples").await.0, StatusCode::OK);

    let (g, _) = fixture_a();
    assert!(state.install(g, BuildInfo::default()));
    assert!(!state.install(PropertyGraph::new(), BuildInfo::default()));
    let (status, body) = get(&state, "/health").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert_eq!(body["node_count"], 16);
}

#[tokio::test]
async fn cors_preflight_is_answered() {
    let state = fixture_state(ServiceConfig::default());
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/query")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .header("access-control-request-headers", "content-type")
        .body(Body::empty())
        .unwrap();
    let resp = router(state).oneshot(req).await.unwrap();
    assert!(resp.status().is_success());
    assert_eq!(resp.headers()["access-control-allow-origin"], "*");
}

fn strip_elapsed(mut v: Value) -> Value {
    v["stats"]["elapsed_ms"] = json!(0);
    v
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_identical_requests_agree() {
    let state = fixture_state(ServiceConfig::default());
    let body = json!({ "statement": example("experts") });
    let tasks: Vec<_> = (0..16)
        .map(|_| {
            let (state, body) = (Arc::clone(&state), body.clone());
            tokio::spawn(async move { query(&state, body).await })
        })
        .collect();
    let mut bodies = Vec::new();
    for t in tasks {
        let (status, body) = t.await.unwrap();
        assert_eq!(status, StatusCode::OK);
        bodies.push(strip_elapsed(body));
    }
    assert!(bodies.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(bodies[0]["stats"]["row_count"], 3);
}

#[test]
fn serves_over_tcp() {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let listener = rt.block_on(tokio::net::TcpListener::bind("127.0.0.1:0")).unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel::<()>();
    let server = rt.spawn(litgraph_service::serve(listener, fixture_state(ServiceConfig::default()), async {
        let _ = rx.await;
    }));
    let agent: ureq::Agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
    let mut resp = agent.get(&format!("http://{addr}/health")).call().unwrap();
    assert_eq!(resp.status(), 200);
    let health: Value = serde_json::from_str(&resp.body_mut().read_to_string().unwrap()).unwrap();
    assert_eq!(health["status"], "ok");
    let mut resp = agent
        .post(&format!("http://{addr}/query"))
        .header("content-type", "application/json")
        .send(json!({"statement": example("paper-by-id")}).to_string())
        .unwrap();
    assert_eq!(resp.status(), 200);
    let body: Value = serde_json::from_str(&resp.body_mut().read_to_string().unwrap()).unwrap();
    assert_eq!(body["rows"][0][0]["properties"]["title"], "T1");
    tx.send(()).unwrap();
    rt.block_on(server).unwrap().unwrap();
}
