//! Wire form of engine errors.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use fqfd_core::pipeline::PipelineError;
use fqfd_core::project::{ProjectError, ValidationIssue};
use fqfd_core::sensitivity::SensitivityError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    /// Machine-readable code shared with the engine's error taxonomy.
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locus: Option<String>,
    /// Every violation, for `ValidationError`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub issues: Vec<ValidationIssue>,
}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        ApiError { code: code.into(), message: message.into(), locus: None, issues: Vec::new() }
    }

    pub fn at(mut self, locus: impl Into<String>) -> Self {
        self.locus = Some(locus.into());
        self
    }

    pub fn not_found(id: &str) -> Self {
        ApiError::new("NotFound", format!("no project with id {id:?}"))
    }

    pub fn status(&self) -> StatusCode {
        match self.code.as_str() {
            "NotFound" => StatusCode::NOT_FOUND,
            "RevisionMismatch" => StatusCode::CONFLICT,
            "InconsistentInput" | "ConvergenceFailure" | "DegenerateDenominator" => StatusCode::UNPROCESSABLE_ENTITY,
            "CannotWrite" | "CannotOpen" | "Internal" => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        }
    }
}

impl From<ProjectError> for ApiError {
    fn from(e: ProjectError) -> Self {
        let mut api = ApiError::new(e.code(), e.to_string());
        if let ProjectError::Validation(issues) = e {
            api.locus = issues.first().map(|i| i.locus.clone());
            api.issues = issues;
        }
        api
    }
}

impl From<PipelineError> for ApiError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Project(p) => p.into(),
            PipelineError::UnknownRespondent(ref id) => {
                let locus = format!("respondents.{id}");
                ApiError::new(e.code(), e.to_string()).at(locus)
            }
            other => ApiError::new(other.code(), other.to_string()),
        }
    }
}

impl From<SensitivityError> for ApiError {
    fn from(e: SensitivityError) -> Self {
        match e {
            SensitivityError::Baseline(p) => p.into(),
            other => ApiError::new(other.code(), other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}
