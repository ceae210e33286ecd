use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use cluster_service::{router, AppState, ServiceConfig};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app_with(config: ServiceConfig) -> Router {
    router(AppState::new(config).unwrap())
}

fn app() -> Router {
    app_with(ServiceConfig::default())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, v)
}

async fn create(app: &Router, payload: Value) -> String {
    let (status, v) = call(app, "POST", "/sessions", Some(payload)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

fn a2() -> Value {
    json!({ "quiver": { "n": 2, "arrows": [[1, 2, 1]] } })
}

fn a3() -> Value {
    json!({ "quiver": { "n": 3, "arrows": [[1, 2, 1], [2, 3, 1]] } })
}

fn cluster(v: &Value) -> Vec<String> {
    v["cluster"].as_array().unwrap().iter().map(|c| c["text"].as_str().unwrap().to_string()).collect()
}

#[tokio::test]
async fn create_and_get() {
    let app = app();
    let id = create(&app, a2()).await;
    let (status, v) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(cluster(&v), ["x1", "x2"]);
    assert_eq!(v["cluster"][0]["terms"], json!([[[1, 0], "1"]]));
    assert_eq!(v["rank3"], Value::Null);

    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "matrix": { "b": [[0, 1], [-1, 0]] } }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(cluster(&v), ["x1", "x2"]);
}

#[tokio::test]
async fn invalid_payloads() {
    let app = app();
    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "quiver": { "n": 2, "arrows": [[1, 1, 1]] } }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("LoopPresent")));
    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "matrix": { "b": [[0, 1], [1, 0]] } }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("NotSkewSymmetric")));
    let (status, v) = call(&app, "POST", "/sessions", Some(json!({ "matrix": { "b": [[0, 1]] } }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{v}");
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({ "other": 1 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let req = Request::builder().method("POST").uri("/sessions").body(Body::from("{not json")).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn markov_session_has_caveat() {
    let app = app();
    let (status, v) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({ "quiver": { "n": 3, "arrows": [[1, 2, 2], [2, 3, 2], [3, 1, 2]] } })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    for vertex in v["rank3"].as_array().unwrap() {
        assert_eq!(vertex["caveat"], json!(["acyclic_class_unverified"]));
        assert_eq!(vertex["case"], "IV");
    }
}

#[tokio::test]
async fn mutate_undo_and_history() {
    let app = app();
    let id = create(&app, a2()).await;
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "vertex": 1 }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["changed"], 1);
    assert_eq!(v["old"], "x1");
    assert_eq!(v["new"], "(x2 + 1)/x1");
    let (_, v) = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "vertex": 1 }))).await;
    assert_eq!(cluster(&v), ["x1", "x2"]);
    assert_eq!(v["history"], json!([1, 1]));

    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(cluster(&v), ["(x2 + 1)/x1", "x2"]);
    call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::CONFLICT, Some("EmptyHistory")));

    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "vertex": 3 }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::BAD_REQUEST, Some("IndexOutOfRange")));
    let (status, v) = call(&app, "POST", "/sessions/nope/mutate", Some(json!({ "vertex": 1 }))).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::NOT_FOUND, Some("SessionNotFound")));
}

#[tokio::test]
async fn a3_middle_mutation_gives_cycle() {
    let app = app();
    let id = create(&app, a3()).await;
    let (_, v) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(v["rank3"][1]["case"], "II");
    let (_, v) = call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "vertex": 2 }))).await;
    assert_eq!(v["quiver"], json!({ "n": 3, "arrows": [[1, 3, 1], [2, 1, 1], [3, 2, 1]] }));
    // The root is acyclic, so the history witnesses the class.
    for vertex in v["rank3"].as_array().unwrap() {
        assert_eq!(vertex["caveat"], json!([]));
        assert_eq!(vertex["zero_vertex"], true);
    }
    let (_, v) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(v["quiver"], json!({ "n": 3, "arrows": [[1, 2, 1], [2, 3, 1]] }));
}

#[tokio::test]
async fn neighborhoods() {
    let app = app_with(ServiceConfig { max_depth: 5, ..Default::default() });
    let id = create(&app, a2()).await;
    let (status, v) = call(&app, "GET", &format!("/sessions/{id}/neighborhood?depth=5"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["nodes"].as_array().unwrap().len(), 5);
    assert_eq!(v["edges"].as_array().unwrap().len(), 10);
    let (_, v) = call(&app, "GET", &format!("/sessions/{id}/neighborhood?depth=0"), None).await;
    assert_eq!(v["nodes"].as_array().unwrap().len(), 1);

    let id3 = create(&app, a3()).await;
    call(&app, "POST", &format!("/sessions/{id3}/mutate"), Some(json!({ "vertex": 2 }))).await;
    let (_, v) = call(&app, "GET", &format!("/sessions/{id3}/neighborhood?depth=1"), None).await;
    assert_eq!(v["nodes"].as_array().unwrap().len(), 4);
    let (status, v) = call(&app, "GET", &format!("/sessions/{id3}/neighborhood?depth=6"), None).await;
    assert_eq!((status, v["error"].as_str()), (StatusCode::BAD_REQUEST, Some("DepthTooLarge")));

    let capped = app_with(ServiceConfig::default());
    let id = create(&capped, a2()).await;
    let (status, _) = call(&capped, "GET", &format!("/sessions/{id}/neighborhood?depth=4"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn verify_and_export() {
    let app = app();
    let id = create(&app, a3()).await;
    for k in [1, 2, 3, 2] {
        call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "vertex": k }))).await;
    }
    let (status, v) = call(&app, "GET", &format!("/sessions/{id}/verify"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, json!({ "consistent": true, "history_length": 4 }));

    let (_, v) = call(&app, "GET", &format!("/sessions/{id}/export?format=json"), None).await;
    assert_eq!(v["history"], json!([1, 2, 3, 2]));
    assert_eq!(v["root"]["cluster"], json!(["x1", "x2", "x3"]));
    let (status, v) = call(&app, "GET", &format!("/sessions/{id}/export?format=dot"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(v.as_str().unwrap().starts_with("digraph quiver {"));
    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/export?format=png"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn journal_replays_sessions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.jsonl");
    let config = ServiceConfig { journal: Some(path.clone()), ..Default::default() };
    let app = app_with(config.clone());
    let id = create(&app, a3()).await;
    for k in [2, 1, 3] {
        call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "vertex": k }))).await;
    }
    call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    let (_, before) = call(&app, "GET", &format!("/sessions/{id}"), None).await;

    let restarted = app_with(config);
    let (status, after) = call(&restarted, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(after["history"], json!([2, 1]));
    assert_eq!(after["cluster"], before["cluster"]);
    assert_eq!(after["quiver"], before["quiver"]);
}

#[tokio::test]
async fn concurrent_sessions_stay_consistent() {
    let state = AppState::new(ServiceConfig::default()).unwrap();
    let app = router(Arc::clone(&state));
    let id = create(&app, a3()).await;
    let mut tasks = Vec::new();
    for i in 0..12 {
        let app = app.clone();
        let id = id.clone();
        tasks.push(tokio::spawn(async move {
            call(&app, "POST", &format!("/sessions/{id}/mutate"), Some(json!({ "vertex": i % 3 + 1 }))).await
        }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap().0, StatusCode::OK);
    }
    let (_, v) = call(&app, "GET", &format!("/sessions/{id}/verify"), None).await;
    assert_eq!(v, json!({ "consistent": true, "history_length": 12 }));
}

#[tokio::test]
async fn static_files_are_served() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>explorer</html>").unwrap();
    let app = app_with(ServiceConfig { static_dir: Some(dir.path().to_path_buf()), ..Default::default() });
    let (status, v) = call(&app, "GET", "/index.html", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, "<html>explorer</html>");
}
