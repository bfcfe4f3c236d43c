#![allow(dead_code)]

use std::sync::{Arc, Mutex};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::{DateTime, TimeZone, Utc};
use flockwatch_core::geo::sample_registry;
use flockwatch_core::knowledge::default_rules;
use flockwatch_core::reports::ReportStore;
use flockwatch_service::{router, AppState, Clock};
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

pub const ALL: [&str; 5] = [
    "depression",
    "comb_wattle_bluish_face",
    "swollen_face",
    "narrow_eyes",
    "balance_disorder",
];
pub const VILLAGE: &str = "18.01.03.2001";

pub fn t0() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2026, 3, 10, 8, 0, 0).unwrap()
}

/// A clock the test can move.
#[derive(Clone)]
pub struct TestClock(pub Arc<Mutex<DateTime<Utc>>>);

impl TestClock {
    pub fn at(t: DateTime<Utc>) -> Self {
        TestClock(Arc::new(Mutex::new(t)))
    }
    pub fn set(&self, t: DateTime<Utc>) {
        *self.0.lock().unwrap() = t;
    }
}

impl Clock for TestClock {
    fn now(&self) -> DateTime<Utc> {
        *self.0.lock().unwrap()
    }
}

pub fn app_with(store: ReportStore, clock: TestClock) -> Router {
    let state = AppState::new(default_rules(), sample_registry(), store).with_clock(clock);
    router(Arc::new(state))
}

pub fn app() -> (Router, TestClock) {
    let clock = TestClock::at(t0());
    (app_with(ReportStore::in_memory(), clock.clone()), clock)
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: Option<String>,
    pub headers: axum::http::HeaderMap,
    pub body: Value,
}

pub async fn send(app: &Router, req: Request<Body>) -> Reply {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let headers = resp.headers().clone();
    let content_type = headers
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let body = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes)
            .unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    Reply {
        status,
        content_type,
        headers,
        body,
    }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

pub async fn post_json(app: &Router, uri: &str, body: &Value) -> Reply {
    post_raw(app, uri, body.to_string()).await
}

pub async fn post_raw(app: &Router, uri: &str, body: String) -> Reply {
    let req = Request::post(uri)
        .header("content-type", "application/json")
        .body(Body::from(body))
        .unwrap();
    send(app, req).await
}

pub fn consultation(region: &str, symptoms: &[&str]) -> Value {
    serde_json::json!({ "region_code": region, "symptom_ids": symptoms })
}

pub fn error_code(reply: &Reply) -> &str {
    reply.body["error"]["code"].as_str().unwrap_or("<none>")
}
