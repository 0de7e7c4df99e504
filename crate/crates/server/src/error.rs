use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use humannav::Error;
use serde::Serialize;

/// Body of every non-2xx response.
#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub error: ErrorDetail,
}

#[derive(Debug, Serialize)]
pub struct ErrorDetail {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug)]
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
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (status, code) = match &e {
            Error::Parse(_) => (StatusCode::BAD_REQUEST, "parse"),
            Error::MalformedAction(_) => (StatusCode::BAD_REQUEST, "malformed_action"),
            Error::SchemaVersion { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "schema_version"),
            Error::DanglingNode { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "dangling_node"),
            Error::DuplicateNode(_) => (StatusCode::UNPROCESSABLE_ENTITY, "duplicate_node"),
            Error::DuplicateEdge(..) => (StatusCode::UNPROCESSABLE_ENTITY, "duplicate_edge"),
            Error::SelfLoop(_) => (StatusCode::UNPROCESSABLE_ENTITY, "self_loop"),
            Error::WeightMismatch { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "weight_mismatch"),
            Error::InvalidHuman { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_human"),
            Error::DuplicateHuman(_) => (StatusCode::UNPROCESSABLE_ENTITY, "duplicate_human"),
            Error::NotAdjacent(..) => (StatusCode::UNPROCESSABLE_ENTITY, "not_adjacent"),
            Error::EpisodeMismatch(_) => (StatusCode::UNPROCESSABLE_ENTITY, "episode_mismatch"),
            Error::InvalidParams(_) => (StatusCode::BAD_REQUEST, "invalid_params"),
            Error::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            Error::UnknownSession(_) => (StatusCode::NOT_FOUND, "unknown_session"),
            Error::EpisodeDone => (StatusCode::CONFLICT, "episode_done"),
            Error::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
            _ => (StatusCode::BAD_REQUEST, "invalid_request"),
        };
        ApiError::new(status, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: ErrorDetail {
                code: self.code,
                message: self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}
