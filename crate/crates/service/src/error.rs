use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cluster_core::error::FormatError;
use cluster_core::{ErrorName, QuiverError, SeedError};
use serde_json::json;

/// An error response: `{"error": name, "detail": message}` with a status code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub name: String,
    pub detail: String,
}

impl ApiError {
    pub fn new(status: StatusCode, name: &str, detail: impl Into<String>) -> Self {
        ApiError { status, name: name.to_string(), detail: detail.into() }
    }

    pub fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "SessionNotFound", format!("no session {id}"))
    }

    pub fn bad_request(name: &str, detail: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, name, detail)
    }

    pub fn internal(detail: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", detail)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.name, "detail": self.detail }))).into_response()
    }
}

/// Structurally valid input that breaks a quiver rule is 422; malformed input is 400.
impl From<QuiverError> for ApiError {
    fn from(e: QuiverError) -> Self {
        let status = match e {
            QuiverError::NotSkewSymmetric { .. }
            | QuiverError::LoopPresent { .. }
            | QuiverError::TwoCyclePresent { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e.name(), e.to_string())
    }
}

impl From<FormatError> for ApiError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Quiver(q) => q.into(),
            other => ApiError::bad_request(other.name(), other.to_string()),
        }
    }
}

impl From<SeedError> for ApiError {
    fn from(e: SeedError) -> Self {
        match e {
            SeedError::Quiver(q) => q.into(),
            SeedError::ExchangeDivisionFailed { .. } => {
                ApiError::new(StatusCode::CONFLICT, e.name(), e.to_string())
            }
            other => ApiError::bad_request(other.name(), other.to_string()),
        }
    }
}
