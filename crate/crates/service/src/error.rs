use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use flockwatch_core::geo::GeoError;
use flockwatch_core::knowledge::DiagnoseError;
use flockwatch_core::reports::StoreError;
use serde_json::json;

/// An error response: `{"error": {"code": ..., "message": ...}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = self.code, message = %self.message, "request failed");
        }
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

impl From<DiagnoseError> for ApiError {
    fn from(e: DiagnoseError) -> Self {
        let message = e.to_string();
        match e {
            DiagnoseError::EmptySelection => Self::bad_request("empty_selection", message),
            DiagnoseError::UnknownSymptom(_) => Self::bad_request("unknown_symptom", message),
            DiagnoseError::TotalConflict { .. } => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "total_conflict", message)
            }
            DiagnoseError::Evidence(_) => Self::internal(message),
        }
    }
}

impl From<GeoError> for ApiError {
    fn from(e: GeoError) -> Self {
        let message = e.to_string();
        match e {
            GeoError::InvalidCode { .. } => Self::bad_request("invalid_region_code", message),
            GeoError::NotFound(_) => Self::not_found("unknown_region", message),
            GeoError::GeometryAbsent(_) => Self::not_found("geometry_absent", message),
            _ => Self::internal(message),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::UnknownRegion(_) => Self::not_found("unknown_region", message),
            StoreError::RegionTooCoarse { .. } => Self::bad_request("region_too_coarse", message),
            StoreError::InvalidFilter(_) => Self::bad_request("invalid_filter", message),
            StoreError::InvalidWindow => Self::bad_request("invalid_window", message),
            StoreError::InvalidDuration { .. } => Self::bad_request("invalid_duration", message),
            StoreError::InvalidReport(_) | StoreError::InvalidPolicy(_) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_report", message)
            }
            StoreError::Corrupt { .. } | StoreError::Io(_) | StoreError::Json(_) => Self::internal(message),
        }
    }
}
