use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use flockwatch_core::geo::{RegionCode, RegionLevel, RegionRecord};
use flockwatch_core::knowledge::{diagnose, Diagnosis, Disease};
use flockwatch_core::reports::{
    parse_iso_duration, ConsultationReport, NewReport, ReportFilter, WarningLevel, WarningStatus,
};
use geojson_body::GeoJsonBody;
use serde::{Deserialize, Serialize};
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::trace::TraceLayer;

use crate::error::ApiError;
use crate::state::AppState;

type Shared = State<Arc<AppState>>;
type Params = Query<HashMap<String, String>>;

/// Builds the API router with CORS for `origins` (`"*"` allows any).
pub fn router(state: Arc<AppState>) -> Router {
    router_with_cors(state, &["*".to_string()])
}

/// Builds the API router, allowing cross-origin requests from `origins`.
pub fn router_with_cors(state: Arc<AppState>, origins: &[String]) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route("/api/symptoms", get(symptoms))
        .route("/api/diseases", get(diseases))
        .route("/api/regions", get(regions))
        .route("/api/regions/{code}", get(region))
        .route("/api/regions/{code}/children", get(region_children))
        .route("/api/regions/{code}/geometry", get(region_geometry))
        .route("/api/geometry", get(level_geometry))
        .route("/api/consultations", post(consult))
        .route("/api/reports", get(reports))
        .route("/api/reports/{id}", get(report))
        .route("/api/warnings", get(warnings))
        .fallback(|| async { ApiError::not_found("not_found", "no such endpoint") })
        .method_not_allowed_fallback(|| async {
            ApiError::new(
                StatusCode::METHOD_NOT_ALLOWED,
                "method_not_allowed",
                "method not allowed",
            )
        })
        .with_state(state);
    api.layer(cors(origins)).layer(TraceLayer::new_for_http())
}

fn cors(origins: &[String]) -> CorsLayer {
    let allow = if origins.iter().any(|o| o == "*") {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers([header::CONTENT_TYPE])
}

/// Query parameter value, treating an empty string as absent.
fn param<'a>(params: &'a HashMap<String, String>, key: &str) -> Option<&'a str> {
    params.get(key).map(|s| s.trim()).filter(|s| !s.is_empty())
}

fn parse_code(text: &str) -> Result<RegionCode, ApiError> {
    Ok(RegionCode::parse(text)?)
}

fn parse_level(text: &str) -> Result<RegionLevel, ApiError> {
    serde_json::from_value(serde_json::Value::String(text.to_ascii_lowercase())).map_err(|_| {
        ApiError::bad_request(
            "invalid_level",
            format!("unknown region level `{text}`; expected province, regency, district or village"),
        )
    })
}

fn parse_instant(key: &str, text: &str) -> Result<DateTime<Utc>, ApiError> {
    DateTime::parse_from_rfc3339(text)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| ApiError::bad_request("invalid_timestamp", format!("`{key}`: {e}")))
}

#[derive(Serialize)]
struct Health {
    status: &'static str,
    rules_version: String,
    regions: usize,
    reports: usize,
}

async fn health(State(state): Shared) -> Json<Health> {
    Json(Health {
        status: "ok",
        rules_version: state.rules.version().to_string(),
        regions: state.registry.snapshot().len(),
        reports: state.store.len(),
    })
}

/// A symptom as offered to the consultation form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymptomView {
    pub id: String,
    pub label: String,
    pub focal: Vec<String>,
    pub bpa: f64,
}

async fn symptoms(State(state): Shared) -> Json<Vec<SymptomView>> {
    Json(
        state
            .rules
            .rules()
            .iter()
            .map(|r| SymptomView {
                id: r.symptom_id.clone(),
                label: r.label.clone(),
                focal: r.focal_labels.clone(),
                bpa: r.bpa,
            })
            .collect(),
    )
}

async fn diseases(State(state): Shared) -> Json<Vec<Disease>> {
    Json(state.rules.diseases().to_vec())
}

async fn regions(State(state): Shared, Query(params): Params) -> Result<Json<Vec<RegionRecord>>, ApiError> {
    let registry = state.registry.snapshot();
    let out = match param(&params, "level") {
        None => registry.roots().into_iter().cloned().collect(),
        Some(level) => {
            let level = parse_level(level)?;
            registry.records().filter(|r| r.level == level).cloned().collect()
        }
    };
    Ok(Json(out))
}

async fn region(State(state): Shared, Path(code): Path<String>) -> Result<Json<RegionRecord>, ApiError> {
    let code = parse_code(&code)?;
    Ok(Json(state.registry.snapshot().lookup(&code)?.clone()))
}

async fn region_children(
    State(state): Shared,
    Path(code): Path<String>,
) -> Result<Json<Vec<RegionRecord>>, ApiError> {
    let code = parse_code(&code)?;
    let registry = state.registry.snapshot();
    Ok(Json(registry.children(&code)?.into_iter().cloned().collect()))
}

async fn region_geometry(State(state): Shared, Path(code): Path<String>) -> Result<GeoJsonBody, ApiError> {
    let code = parse_code(&code)?;
    let feature = state.registry.snapshot().geometry_of(&code)?;
    Ok(GeoJsonBody(geojson::GeoJson::Feature(feature)))
}

/// Every region at one level as a FeatureCollection, for map layers.
/// Regions whose geometry cannot be resolved are left out.
async fn level_geometry(State(state): Shared, Query(params): Params) -> Result<GeoJsonBody, ApiError> {
    let level = match param(&params, "level") {
        Some(l) => parse_level(l)?,
        None => return Err(ApiError::bad_request("missing_parameter", "`level` is required")),
    };
    let registry = state.registry.snapshot();
    let features = registry
        .records()
        .filter(|r| r.level == level)
        .filter_map(|r| registry.geometry_of(&r.code).ok())
        .collect();
    Ok(GeoJsonBody(geojson::GeoJson::FeatureCollection(
        geojson::FeatureCollection {
            bbox: None,
            features,
            foreign_members: None,
        },
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsultationRequest {
    #[serde(alias = "region")]
    pub region_code: String,
    #[serde(alias = "symptoms")]
    pub symptom_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsultationResponse {
    pub report_id: u64,
    pub timestamp: DateTime<Utc>,
    pub region_code: RegionCode,
    pub diagnosis: Diagnosis,
}

/// Diagnoses and records a consultation in one step.
///
/// The region is checked before the symptoms, so an unknown region is a 404
/// even when the selection is also invalid.
async fn consult(State(state): Shared, body: Bytes) -> Result<Response, ApiError> {
    let req: ConsultationRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request("malformed_body", e.to_string()))?;
    let region = parse_code(&req.region_code)?;
    let registry = state.registry.snapshot();
    registry.lookup(&region)?;

    let diagnosis = diagnose(&state.rules, &req.symptom_ids)?;
    let timestamp = state.clock.now();
    let new = NewReport {
        timestamp,
        region: region.clone(),
        diagnosis: diagnosis.clone(),
    };
    let writer = state.clone();
    let report_id = tokio::task::spawn_blocking(move || writer.store.append(new, &registry))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;

    let body = ConsultationResponse {
        report_id,
        timestamp,
        region_code: region,
        diagnosis,
    };
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn reports(
    State(state): Shared,
    Query(params): Params,
) -> Result<Json<Vec<ConsultationReport>>, ApiError> {
    let filter = ReportFilter {
        region: param(&params, "region").map(parse_code).transpose()?,
        from: param(&params, "from")
            .map(|t| parse_instant("from", t))
            .transpose()?,
        to: param(&params, "to").map(|t| parse_instant("to", t)).transpose()?,
        disease: param(&params, "disease").map(str::to_string),
    };
    Ok(Json(state.store.query(&filter)?))
}

async fn report(State(state): Shared, Path(id): Path<String>) -> Result<Json<ConsultationReport>, ApiError> {
    let id: u64 = id
        .parse()
        .map_err(|_| ApiError::bad_request("invalid_report_id", format!("`{id}` is not a report id")))?;
    state
        .store
        .get(id)
        .map(Json)
        .ok_or_else(|| ApiError::not_found("unknown_report", format!("report {id} not found")))
}

/// Warning level of every region over the window ending now.
async fn warnings(State(state): Shared, Query(params): Params) -> Result<Json<Vec<WarningStatus>>, ApiError> {
    let window = match param(&params, "window") {
        Some(text) => parse_iso_duration(text)?,
        None => state.default_window,
    };
    let level: Option<WarningLevel> = param(&params, "level").map(|l| l.parse()).transpose().map_err(
        |e: flockwatch_core::reports::StoreError| ApiError::bad_request("invalid_level", e.to_string()),
    )?;
    let registry = state.registry.snapshot();
    let mut out = state
        .store
        .warning_levels(&registry, window, state.clock.now(), &state.policy)?;
    if let Some(level) = level {
        out.retain(|s| s.level == level);
    }
    Ok(Json(out))
}

mod geojson_body {
    use axum::http::header;
    use axum::response::{IntoResponse, Response};

    pub const GEOJSON_CONTENT_TYPE: &str = "application/geo+json";

    pub struct GeoJsonBody(pub geojson::GeoJson);

    impl IntoResponse for GeoJsonBody {
        fn into_response(self) -> Response {
            ([(header::CONTENT_TYPE, GEOJSON_CONTENT_TYPE)], self.0.to_string()).into_response()
        }
    }
}
