//! Process exit statuses and the mapping from engine errors onto them.

use std::fmt;
use std::process::ExitCode;

use fqfd_core::pipeline::PipelineError;
use fqfd_core::project::ProjectError;
use fqfd_core::sensitivity::SensitivityError;
use fqfd_core::table::ImportError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// The document parsed but violates the schema's invariants.
    Validation = 2,
    /// A judgment matrix exceeds the consistency threshold.
    Inconsistent = 3,
    /// Power iteration or fuzzy normalization could not produce a result.
    Numerical = 4,
    Usage = 64,
    /// Malformed input data.
    Data = 65,
    CannotOpen = 66,
    Internal = 70,
    CannotCreate = 73,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        ExitCode::from(s as u8)
    }
}

/// A failure carrying its exit status and the lines to print on stderr.
#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub code: &'static str,
    pub message: String,
}

impl Failure {
    pub fn new(status: Status, code: &'static str, message: impl Into<String>) -> Self {
        Failure { status, code, message: message.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

pub fn status_for_code(code: &str) -> Status {
    match code {
        "ValidationError"
        | "NotReciprocal"
        | "DiagonalNotOne"
        | "NotSquare"
        | "MissingJudgment"
        | "DuplicateJudgment"
        | "NonPositiveJudgment"
        | "ShapeMismatch"
        | "InvalidIndex"
        | "RoofDiagonal"
        | "RoofAsymmetric"
        | "InvalidHierarchy"
        | "EmptyMatrix"
        | "EmptyModel"
        | "LabelCount"
        | "EmptyGroup"
        | "InvalidWeight" => Status::Validation,
        "InconsistentInput" => Status::Inconsistent,
        "ConvergenceFailure"
        | "DegenerateDenominator"
        | "NonFinite"
        | "DivisorNotPositive"
        | "NegativeOperand"
        | "NegativeScalar"
        | "OrderingViolation" => Status::Numerical,
        "UnknownRespondent" | "InvalidSpec" => Status::Usage,
        "ParseError"
        | "UnknownField"
        | "MissingSchemaVersion"
        | "SchemaVersionUnsupported"
        | "UnknownLinguisticToken"
        | "BadNumber" => Status::Data,
        "CannotOpen" => Status::CannotOpen,
        "CannotWrite" => Status::CannotCreate,
        _ => Status::Internal,
    }
}

impl From<ProjectError> for Failure {
    fn from(e: ProjectError) -> Self {
        Failure::new(status_for_code(e.code()), e.code(), e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure::new(status_for_code(e.code()), e.code(), e.to_string())
    }
}

impl From<SensitivityError> for Failure {
    fn from(e: SensitivityError) -> Self {
        Failure::new(status_for_code(e.code()), e.code(), e.to_string())
    }
}

impl From<ImportError> for Failure {
    fn from(e: ImportError) -> Self {
        Failure::new(status_for_code(e.code()), e.code(), e.to_string())
    }
}
