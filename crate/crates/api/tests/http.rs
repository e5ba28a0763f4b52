use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;
use tqmine_api::*;
use tqmine_core::{mine_patterns, DataGraph, MineOptions, PatternStore, Tree, TreePattern};

const G7: &str = "0 1\n0 2\n0 3\n1 4\n2 4\n2 5\n3 6\n";

fn tree(levels: &[u32]) -> Tree {
    Tree::from_levels(levels.to_vec()).unwrap()
}

fn state(trees: &[&[u32]]) -> AppState {
    let g = DataGraph::parse(G7).unwrap();
    let mut opts = MineOptions::new(3, 4);
    opts.trees = Some(trees.iter().map(|l| tree(l)).collect());
    let store = mine_patterns(&g, &opts).unwrap().0;
    AppState::new(store, g)
}

fn example_state() -> AppState {
    state(&[&[0, 1, 1]])
}

fn rules_state() -> AppState {
    state(&[&[0, 1, 1], &[0, 1, 1, 1]])
}

async fn call(s: &AppState, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = router(s.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp
        .into_body()
        .collect()
        .await
        .unwrap()
        .to_bytes()
        .to_vec();
    (status, bytes)
}

async fn json_of(
    s: &AppState,
    method: &str,
    uri: &str,
    body: Option<Value>,
) -> (StatusCode, Value) {
    let (status, bytes) = call(s, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn rows(v: &Value) -> Vec<(Vec<String>, u64)> {
    v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let values = r["values"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_str().unwrap().to_string())
                .collect();
            (values, r["freq"].as_u64().unwrap())
        })
        .collect()
}

fn strs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[tokio::test]
async fn patterns_lists_the_example_tables() {
    let s = example_state();
    let (status, v) = json_of(&s, "GET", "/patterns", None).await;
    assert_eq!(status, StatusCode::OK);
    let list = v.as_array().unwrap();
    assert_eq!(list.len(), 6);
    let keys: Vec<&str> = list.iter().map(|p| p["key"].as_str().unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);

    let key = TreePattern::new(tree(&[0, 1, 1]), &[], &[0])
        .unwrap()
        .refined_level_sequence();
    let entry = list.iter().find(|p| p["key"] == key.as_str()).unwrap();
    assert_eq!(entry["rows"], 2);
    assert_eq!(entry["sigma"], json!([0]));

    let (status, v) = json_of(&s, "GET", &format!("/patterns/{key}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["columns"], json!(["x1"]));
    assert_eq!(rows(&v), vec![(strs(&["0"]), 9), (strs(&["2"]), 4)]);
}

#[tokio::test]
async fn unknown_pattern_is_404() {
    let (status, v) = json_of(&example_state(), "GET", "/patterns/0p9z", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(v["error"].as_str().unwrap().contains("0p9z"));
}

#[tokio::test]
async fn empty_store_lists_nothing() {
    let g = DataGraph::parse(G7).unwrap();
    let s = AppState::new(PatternStore::new(g.fingerprint(), 3, 3), g);
    let (status, v) = json_of(&s, "GET", "/patterns", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, json!([]));
    let (_, v) = json_of(&s, "GET", "/graph/summary", None).await;
    assert_eq!(v["patterns"], 0);
    assert_eq!(v["nodes"], 7);
    assert_eq!(v["edges"], 7);
}

#[tokio::test]
async fn match_reads_the_store() {
    let s = example_state();
    let (status, v) = json_of(
        &s,
        "POST",
        "/match",
        Some(json!({"query": "(a:p (b:d) (c:d))"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["adhoc"], false);
    assert_eq!(v["columns"], json!(["a"]));
    assert_eq!(rows(&v), vec![(strs(&["0"]), 9), (strs(&["2"]), 4)]);

    let (_, v) = json_of(
        &s,
        "POST",
        "/match",
        Some(json!({"query": "(a:p=0 (b:d) (c:d))"})),
    )
    .await;
    assert_eq!(v["columns"], json!([]));
    assert_eq!(rows(&v), vec![(vec![], 9)]);
    assert_eq!(v["pattern"]["nodes"][0]["const"], "0");

    let (status, v) = json_of(
        &s,
        "POST",
        "/match",
        Some(json!({"query": "(a:p=nowhere (b:d) (c:d))"})),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["rows"], json!([]));
}

#[tokio::test]
async fn match_reduces_before_lookup() {
    // A redundant existential leaf does not change the table.
    let s = example_state();
    let (_, v) = json_of(
        &s,
        "POST",
        "/match",
        Some(json!({"query": "(a:p (b:d) (c:d) (d:e))"})),
    )
    .await;
    assert_eq!(v["adhoc"], false);
    assert_eq!(rows(&v), vec![(strs(&["0"]), 9), (strs(&["2"]), 4)]);
}

#[tokio::test]
async fn match_evaluates_unstored_patterns() {
    let s = example_state();
    let (status, v) = json_of(&s, "POST", "/match", Some(json!({"query": "(a:p (b:p))"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["adhoc"], true);
    // Every edge occurs once, below minsup 3.
    assert_eq!(v["rows"], json!([]));

    let (_, v) = json_of(
        &s,
        "POST",
        "/match",
        Some(json!({"query": "(a:p (b:e (c:d)))"})),
    )
    .await;
    assert_eq!(v["adhoc"], true);
    assert_eq!(rows(&v), vec![(strs(&["0"]), 3)]);
}

#[tokio::test]
async fn match_errors() {
    let s = example_state();
    let (status, v) = json_of(&s, "POST", "/match", Some(json!({"query": "(a:q"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("syntax"));

    let big = "(a:p (b:p) (c:p) (d:p) (e:p) (f:p) (g:p) (h:p) (i:p))";
    let (status, v) = json_of(&s, "POST", "/match", Some(json!({ "query": big }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("limited to 8"));
}

fn fixture_request() -> Value {
    json!({
        "lhs": "x1,x3,x4\n(x1:d (x2:p) (x3:d) (x4:d))",
        "minconf": "30%",
        "rhs_max_nodes": 3,
    })
}

#[tokio::test]
async fn rules_for_the_fixture() {
    let s = rules_state();
    let (status, v) = json_of(&s, "POST", "/rules", Some(fixture_request())).await;
    assert_eq!(status, StatusCode::OK);
    let rules = v.as_array().unwrap();
    assert_eq!(rules.len(), 6);
    let total: usize = rules
        .iter()
        .map(|r| r["rows"].as_array().unwrap().len())
        .sum();
    assert_eq!(total, 21);
    for r in rules {
        for row in r["rows"].as_array().unwrap() {
            let pct = row["percent"].as_u64().unwrap();
            assert_eq!(pct, if row["lhs_freq"] == 5 { 60 } else { 33 });
            assert_eq!(row["conf"], format!("{}/{}", row["freq"], row["lhs_freq"]));
        }
    }

    let mut req = fixture_request();
    req["equivalence"] = json!("full");
    let (_, v) = json_of(&s, "POST", "/rules", Some(req)).await;
    assert_eq!(v.as_array().unwrap().len(), 4);

    let mut req = fixture_request();
    req["minconf"] = json!(1.0);
    let (status, v) = json_of(&s, "POST", "/rules", Some(req)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, json!([]));
}

#[tokio::test]
async fn rules_errors() {
    let s = rules_state();
    let req = json!({"lhs": "(x1:d (x2:p (x3:d)))", "minconf": 0.5});
    let (status, v) = json_of(&s, "POST", "/rules", Some(req)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert!(v["error"].as_str().unwrap().contains("not in the store"));
    assert!(v["hint"].is_string());

    let mut req = fixture_request();
    req["minconf"] = json!("150%");
    let (status, _) = json_of(&s, "POST", "/rules", Some(req)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let mut req = fixture_request();
    req["equivalence"] = json!("sometimes");
    let (status, _) = json_of(&s, "POST", "/rules", Some(req)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn responses_are_stable() {
    let s = rules_state();
    let a = call(&s, "POST", "/rules", Some(fixture_request())).await;
    let b = call(&s, "POST", "/rules", Some(fixture_request())).await;
    assert_eq!(a, b);
    let a = call(&s, "GET", "/patterns", None).await;
    let b = call(&s, "GET", "/patterns", None).await;
    assert_eq!(a, b);
}

#[test]
fn api_patterns_round_trip() {
    let s = rules_state();
    for (_, e) in s.store().entries() {
        let api = ApiPattern::from_pattern(&e.pattern);
        assert_eq!(api.to_pattern().unwrap(), e.pattern);
        let text = serde_json::to_string(&api).unwrap();
        assert_eq!(serde_json::from_str::<ApiPattern>(&text).unwrap(), api);
    }
}

#[test]
fn load_refuses_a_stale_store() {
    let dir = tempfile::tempdir().unwrap();
    let s = example_state();
    s.store().save(dir.path(), s.graph()).unwrap();
    let graph = dir.path().join("g.txt");
    std::fs::write(&graph, G7).unwrap();
    assert!(AppState::load(dir.path(), &graph).is_ok());
    std::fs::write(&graph, format!("{G7}5 6\n")).unwrap();
    let err = AppState::load(dir.path(), &graph).err().unwrap();
    assert!(
        matches!(err, tqmine_core::Error::StaleStore { .. }),
        "{err}"
    );
}
