use std::path::PathBuf;
use std::sync::Arc;

use astd_cli::server::{router, App};
use astd_cli::session::Session;
use astd_core::engine::System;
use astd_core::spec_lang::load_file;
use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use proptest::prelude::*;
use serde_json::{json, Value};
use tower::ServiceExt;

fn system(name: &str) -> System {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    System::new(load_file(&p).unwrap()).unwrap()
}

fn app(names: &[&str]) -> Router {
    router(Arc::new(App::new(names.iter().map(|n| system(n)).collect())))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn new_session(app: &Router) -> (String, Value) {
    let (status, snap) = call(app, "POST", "/sessions", Some(json!({}))).await;
    assert_eq!(status, StatusCode::CREATED);
    (snap["id"].as_str().unwrap().to_string(), snap)
}

#[tokio::test]
async fn lists_specs_by_name() {
    let app = app(&["trains_L1.astd", "trains_L2.astd"]);
    let (status, body) = call(&app, "GET", "/specs", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({ "specs": ["trains_L1", "trains_L2"] }));

    let (status, _) = call(&app, "POST", "/sessions", Some(json!({}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", "/sessions", Some(json!({ "specName": "nope" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, snap) = call(&app, "POST", "/sessions", Some(json!({ "specName": "trains_L2" }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(snap["spec"], "trains_L2");
}

#[tokio::test]
async fn initial_snapshot() {
    let app = app(&["trains_L1.astd"]);
    let (_, snap) = new_session(&app).await;
    assert_eq!(snap["trace"], json!([]));
    assert_eq!(
        snap["enabled"],
        json!([
            { "event": "start(t1)", "successorCount": 4 },
            { "event": "start(t2)", "successorCount": 4 },
        ])
    );
    assert_eq!(snap["dataVars"], json!([{ "name": "position", "value": "{}" }]));
    assert_eq!(snap["invariantStatus"][0]["holds"], true);
    let tree = &snap["controlTree"];
    assert_eq!(tree["kind"], "quantification");
    assert_eq!(tree["operator"], "interleave");
    assert_eq!(tree["instances"][0]["value"], "t1");
    assert_eq!(tree["instances"][0]["state"]["name"], "S1");
    assert_eq!(tree["instances"][0]["state"]["state"], "1.1");
}

#[tokio::test]
async fn step_undo_and_reset() {
    let app = app(&["trains_L1.astd"]);
    let (id, initial) = new_session(&app).await;
    let step = format!("/sessions/{id}/step");

    let (status, snap) = call(&app, "POST", &step, Some(json!({ "event": "start(t1)", "choiceIndex": 0 }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(snap["dataVars"][0]["value"], "{t1 |-> p1}");
    assert_eq!(snap["trace"], json!([{ "event": "start(t1)", "choiceIndex": 0 }]));
    let sub = &snap["controlTree"]["instances"][0]["state"]["sub"];
    assert_eq!(sub["kind"], "kleene");

    let (status, got) = call(&app, "GET", &format!("/sessions/{id}/state"), None).await;
    assert_eq!((status, &got), (StatusCode::OK, &snap));

    let (status, back) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!((status, &back), (StatusCode::OK, &initial));
    let (status, again) = call(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!((status, &again), (StatusCode::OK, &initial));

    call(&app, "POST", &step, Some(json!({ "event": "start(t2)", "choiceIndex": 3 }))).await;
    let (status, reset) = call(&app, "POST", &format!("/sessions/{id}/reset"), None).await;
    assert_eq!((status, &reset), (StatusCode::OK, &initial));
}

#[tokio::test]
async fn refusals_and_bad_requests() {
    let app = app(&["trains_L1.astd"]);
    let (id, _) = new_session(&app).await;
    let step = format!("/sessions/{id}/step");

    let (status, body) = call(&app, "POST", &step, Some(json!({ "event": "movement(t1)" }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["refusal"], "control");
    assert!(body["reason"].as_str().unwrap().contains("control refuses"), "{body}");
    assert_eq!(body["trace"], json!([]));

    let (status, _) = call(&app, "POST", &step, Some(json!({ "event": "start(t1)", "choiceIndex": 4 }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let (status, _) = call(&app, "POST", &step, Some(json!({ "event": "start(t9)" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "POST", &step, Some(json!({ "event": "fly(t1)" }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, _) = call(&app, "GET", "/sessions/s999/state", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/sessions/s999/step", Some(json!({ "event": "start(t1)" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = app(&["trains_L1.astd"]);
    let (a, initial) = new_session(&app).await;
    let (b, _) = new_session(&app).await;
    assert_ne!(a, b);
    call(&app, "POST", &format!("/sessions/{a}/step"), Some(json!({ "event": "start(t1)" }))).await;
    let (_, snap) = call(&app, "GET", &format!("/sessions/{b}/state"), None).await;
    assert_eq!(snap["trace"], initial["trace"]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Replaying the recorded trace reaches the current state, whatever mix
    /// of steps and undos produced it.
    #[test]
    fn replaying_the_trace_reaches_the_current_state(
        ops in prop::collection::vec((0usize..8, 0usize..6, prop::bool::weighted(0.2)), 0..24),
        level in 1usize..=2,
    ) {
        let sys = Arc::new(system(&format!("trains_L{level}.astd")));
        let mut s = Session::new(sys).unwrap();
        for (pick, choice, undo) in ops {
            if undo {
                s.undo();
                continue;
            }
            let enabled = s.enabled().unwrap();
            if enabled.is_empty() {
                break;
            }
            let e = &enabled[pick % enabled.len()];
            s.step(&e.event, choice % e.successor_count).unwrap();
        }
        prop_assert_eq!(&s.replay().unwrap(), s.current());
    }
}
