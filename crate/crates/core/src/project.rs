//! Project documents: catalogs, respondent judgment matrices, the linguistic
//! relationship grid and roof, and engine configuration.
//!
//! The on-disk form is a single JSON document. `schema_version` is mandatory
//! and unknown fields are rejected. Field by field:
//!
//! | field           | content                                                             |
//! |-----------------|---------------------------------------------------------------------|
//! | `schema_version`| integer, currently `1`                                              |
//! | `name`          | project name                                                        |
//! | `description`   | free text (optional)                                                |
//! | `crs`, `trs`    | `[{ "code", "label" }]` customer / technical requirements           |
//! | `criteria`      | `[{ "code", "label" }]` criteria the CRs are compared under          |
//! | `respondents`   | `[{ "id", "criteria_matrix", "local_matrices": { code: matrix } }]` |
//! | `relationships` | CR x TR grid of `"S"`, `"M"`, `"W"` or `""`                          |
//! | `roof`          | symmetric TR x TR grid of `"+"`, `"-"` or `""`, empty diagonal        |
//! | `config`        | optional, see [`ProjectConfig`]                                     |
//!
//! Matrices are full row-major arrays of positive numbers and must be
//! reciprocal with a unit diagonal.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ahp::{
    aggregate_group, Hierarchy, PairwiseMatrix, PowerIteration, SynthesisOptions, WeightMethod,
    DEFAULT_CONSISTENCY_THRESHOLD,
};
use crate::fuzzy::{CorrelationDegree, RelationshipDegree};
use crate::hoq::{HoqModel, Requirement, Roof};

pub const SCHEMA_VERSION: u32 = 1;
pub const SUPPORTED_SCHEMA_VERSIONS: &[u32] = &[1];

const BUNDLED: &str = include_str!("../data/saffron_solar_dryer.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    /// Path to the offending element, e.g. `respondents[0].local_matrices.C2`.
    pub locus: String,
    pub code: String,
    pub message: String,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} ({})", self.locus, self.message, self.code)
    }
}

fn render_issues(issues: &[ValidationIssue]) -> String {
    issues.iter().map(|i| format!("\n  {i}")).collect()
}

#[derive(Debug, Error)]
pub enum ProjectError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("document has no schema_version field")]
    MissingSchemaVersion,
    #[error("schema_version {found} is not supported (supported: {supported:?})")]
    SchemaVersionUnsupported { found: String, supported: &'static [u32] },
    #[error("line {line}, column {column}: field {field:?} is not part of schema version {schema_version}")]
    UnknownField { field: String, schema_version: u32, line: usize, column: usize },
    #[error("project failed validation with {} issue(s):{}", .0.len(), render_issues(.0))]
    Validation(Vec<ValidationIssue>),
}

impl ProjectError {
    pub fn code(&self) -> &'static str {
        match self {
            ProjectError::Io { .. } => "CannotOpen",
            ProjectError::Write { .. } => "CannotWrite",
            ProjectError::Parse { .. } => "ParseError",
            ProjectError::MissingSchemaVersion => "MissingSchemaVersion",
            ProjectError::SchemaVersionUnsupported { .. } => "SchemaVersionUnsupported",
            ProjectError::UnknownField { .. } => "UnknownField",
            ProjectError::Validation(_) => "ValidationError",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Respondent {
    pub id: String,
    /// Criteria compared with respect to the goal.
    pub criteria_matrix: Vec<Vec<f64>>,
    /// CRs compared under each criterion, keyed by criterion code.
    pub local_matrices: BTreeMap<String, Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Element-wise geometric mean of individual judgments.
    #[default]
    GeometricMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub consistency_threshold: f64,
    /// Synthesize weights even when a matrix exceeds the threshold.
    pub allow_inconsistent: bool,
    pub weight_method: WeightMethod,
    pub aggregation: Aggregation,
    pub power_iteration: PowerIteration,
    pub tie_break: TieBreak,
}

impl Default for ProjectConfig {
    fn default() -> Self {
        ProjectConfig {
            consistency_threshold: DEFAULT_CONSISTENCY_THRESHOLD,
            allow_inconsistent: false,
            weight_method: WeightMethod::Eigenvector,
            aggregation: Aggregation::GeometricMean,
            power_iteration: PowerIteration::default(),
            tie_break: TieBreak::LowestIndex,
        }
    }
}

impl ProjectConfig {
    pub fn synthesis_options(&self) -> SynthesisOptions {
        SynthesisOptions {
            method: self.weight_method,
            power: self.power_iteration,
            threshold: self.consistency_threshold,
            allow_inconsistent: self.allow_inconsistent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoqProject {
    pub schema_version: u32,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub crs: Vec<Requirement>,
    pub trs: Vec<Requirement>,
    pub criteria: Vec<Requirement>,
    pub respondents: Vec<Respondent>,
    pub relationships: Vec<Vec<RelationshipDegree>>,
    pub roof: Vec<Vec<CorrelationDegree>>,
    #[serde(default)]
    pub config: ProjectConfig,
}

/// Which judgments feed the weight derivation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Selection {
    /// Geometric-mean aggregate over all respondents.
    #[default]
    Group,
    Respondent(String),
}

impl std::fmt::Display for Selection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Selection::Group => f.write_str("group"),
            Selection::Respondent(id) => write!(f, "respondent {id}"),
        }
    }
}

fn codes(reqs: &[Requirement]) -> Vec<String> {
    reqs.iter().map(|r| r.code.clone()).collect()
}

struct Issues(Vec<ValidationIssue>);

impl Issues {
    fn push(&mut self, locus: impl Into<String>, code: &str, message: impl Into<String>) {
        self.0.push(ValidationIssue { locus: locus.into(), code: code.into(), message: message.into() });
    }
}

impl HoqProject {
    /// A project with empty grids, identity judgment matrices and one respondent.
    pub fn blank(name: &str, crs: Vec<Requirement>, trs: Vec<Requirement>, criteria: Vec<Requirement>) -> Self {
        let ones = |n: usize| vec![vec![1.0; n]; n];
        let respondent = Respondent {
            id: "R1".into(),
            criteria_matrix: ones(criteria.len()),
            local_matrices: criteria.iter().map(|c| (c.code.clone(), ones(crs.len()))).collect(),
        };
        HoqProject {
            schema_version: SCHEMA_VERSION,
            name: name.into(),
            description: String::new(),
            relationships: vec![vec![RelationshipDegree::None; trs.len()]; crs.len()],
            roof: vec![vec![CorrelationDegree::None; trs.len()]; trs.len()],
            crs,
            trs,
            criteria,
            respondents: vec![respondent],
            config: ProjectConfig::default(),
        }
    }

    /// Every violation, in document order.
    pub fn validate(&self) -> Vec<ValidationIssue> {
        let mut issues = Issues(Vec::new());
        if !SUPPORTED_SCHEMA_VERSIONS.contains(&self.schema_version) {
            issues.push(
                "schema_version",
                "SchemaVersionUnsupported",
                format!("version {} is not supported", self.schema_version),
            );
        }
        for (field, list) in [("crs", &self.crs), ("trs", &self.trs), ("criteria", &self.criteria)] {
            if list.is_empty() {
                issues.push(field, "Empty", "at least one entry is required");
            }
            let mut seen = HashSet::new();
            for (k, r) in list.iter().enumerate() {
                if r.code.trim().is_empty() {
                    issues.push(format!("{field}[{k}].code"), "EmptyCode", "code must not be empty");
                } else if !seen.insert(r.code.as_str()) {
                    issues.push(
                        format!("{field}[{k}].code"),
                        "DuplicateCode",
                        format!("code {:?} is used more than once", r.code),
                    );
                }
            }
        }
        let (n, m, q) = (self.crs.len(), self.trs.len(), self.criteria.len());

        if self.respondents.is_empty() {
            issues.push("respondents", "Empty", "at least one respondent is required");
        }
        let mut seen = HashSet::new();
        for (r, resp) in self.respondents.iter().enumerate() {
            let base = format!("respondents[{r}]");
            if !seen.insert(resp.id.as_str()) {
                issues.push(
                    format!("{base}.id"),
                    "DuplicateId",
                    format!("respondent id {:?} is used more than once", resp.id),
                );
            }
            if q > 0 {
                if let Err(e) = PairwiseMatrix::from_rows(codes(&self.criteria), resp.criteria_matrix.clone()) {
                    issues.push(format!("{base}.criteria_matrix"), e.code(), e.to_string());
                }
            }
            for c in &self.criteria {
                if !resp.local_matrices.contains_key(&c.code) {
                    issues.push(
                        format!("{base}.local_matrices"),
                        "MissingMatrix",
                        format!("no matrix for criterion {}", c.code),
                    );
                }
            }
            for (code, rows) in &resp.local_matrices {
                let locus = format!("{base}.local_matrices.{code}");
                if !self.criteria.iter().any(|c| &c.code == code) {
                    issues.push(locus, "UnknownCriterion", format!("{code} is not a criterion code"));
                } else if let Err(e) = PairwiseMatrix::from_rows(codes(&self.crs), rows.clone()) {
                    issues.push(locus, e.code(), e.to_string());
                }
            }
        }

        if self.relationships.len() != n {
            issues.push(
                "relationships",
                "ShapeMismatch",
                format!("grid has {} rows, expected {n} (one per CR)", self.relationships.len()),
            );
        }
        for (i, row) in self.relationships.iter().enumerate() {
            if row.len() != m {
                issues.push(
                    format!("relationships[{i}]"),
                    "ShapeMismatch",
                    format!("row has {} cells, expected {m} (one per TR)", row.len()),
                );
            }
        }

        if self.roof.len() != m || self.roof.iter().any(|r| r.len() != m) {
            issues.push("roof", "ShapeMismatch", format!("roof must be {m}x{m}"));
        } else {
            for j in 0..m {
                if self.roof[j][j] != CorrelationDegree::None {
                    issues.push(format!("roof[{j}][{j}]"), "RoofDiagonal", "diagonal cells must be empty");
                }
                for k in j + 1..m {
                    if self.roof[j][k] != self.roof[k][j] {
                        issues.push(
                            format!("roof[{j}][{k}]"),
                            "RoofAsymmetric",
                            format!(
                                "{:?} differs from mirrored cell {:?}",
                                self.roof[j][k].token(),
                                self.roof[k][j].token()
                            ),
                        );
                    }
                }
            }
        }

        let cfg = &self.config;
        if !(cfg.consistency_threshold >= 0.0 && cfg.consistency_threshold.is_finite()) {
            issues.push("config.consistency_threshold", "InvalidConfig", "threshold must be a nonnegative number");
        }
        if !(cfg.power_iteration.tolerance > 0.0 && cfg.power_iteration.tolerance.is_finite()) {
            issues.push("config.power_iteration.tolerance", "InvalidConfig", "tolerance must be positive");
        }
        if cfg.power_iteration.max_iterations == 0 {
            issues.push("config.power_iteration.max_iterations", "InvalidConfig", "at least one iteration is required");
        }
        issues.0
    }

    pub fn ensure_valid(&self) -> Result<(), ProjectError> {
        let issues = self.validate();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ProjectError::Validation(issues))
        }
    }

    pub fn respondent(&self, id: &str) -> Option<&Respondent> {
        self.respondents.iter().find(|r| r.id == id)
    }

    pub fn respondent_mut(&mut self, id: &str) -> Option<&mut Respondent> {
        self.respondents.iter_mut().find(|r| r.id == id)
    }

    fn respondent_hierarchy(&self, resp: &Respondent) -> Result<Hierarchy, crate::ahp::AhpError> {
        let criteria = PairwiseMatrix::from_rows(codes(&self.criteria), resp.criteria_matrix.clone())?;
        let local = self
            .criteria
            .iter()
            .map(|c| {
                let rows = resp.local_matrices.get(&c.code).cloned().unwrap_or_default();
                PairwiseMatrix::from_rows(codes(&self.crs), rows)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Hierarchy::new(criteria, local)
    }

    /// Hierarchy for a selection. `None` when the respondent does not exist.
    pub fn hierarchy(&self, selection: &Selection) -> Option<Result<Hierarchy, crate::ahp::AhpError>> {
        match selection {
            Selection::Respondent(id) => self.respondent(id).map(|r| self.respondent_hierarchy(r)),
            Selection::Group => Some(self.group_hierarchy()),
        }
    }

    fn group_hierarchy(&self) -> Result<Hierarchy, crate::ahp::AhpError> {
        let individual =
            self.respondents.iter().map(|r| self.respondent_hierarchy(r)).collect::<Result<Vec<_>, _>>()?;
        let criteria: Vec<PairwiseMatrix> = individual.iter().map(|h| h.criteria().clone()).collect();
        let criteria = aggregate_group(&criteria)?;
        let local = (0..self.criteria.len())
            .map(|k| {
                let group: Vec<PairwiseMatrix> = individual.iter().map(|h| h.local()[k].clone()).collect();
                aggregate_group(&group)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Hierarchy::new(criteria, local)
    }

    pub fn roof_model(&self) -> Result<Roof, crate::hoq::HoqError> {
        Roof::from_grid(&self.roof)
    }

    pub fn hoq_model(&self, weights: Vec<f64>) -> Result<HoqModel, crate::hoq::HoqError> {
        HoqModel::new(self.crs.clone(), self.trs.clone(), weights, self.relationships.clone(), self.roof_model()?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("project serializes");
        s.push('\n');
        s
    }

    /// Parses and validates a document.
    pub fn from_json(text: &str) -> Result<Self, ProjectError> {
        let project = parse_document(text)?;
        project.ensure_valid()?;
        Ok(project)
    }
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<serde_json::Value>,
}

fn parse_error(e: serde_json::Error) -> ProjectError {
    ProjectError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses a document without running validation.
pub fn parse_document(text: &str) -> Result<HoqProject, ProjectError> {
    let probe: VersionProbe = serde_json::from_str(text).map_err(parse_error)?;
    let version = probe.schema_version.ok_or(ProjectError::MissingSchemaVersion)?;
    let schema_version = match version.as_u64() {
        Some(v) if SUPPORTED_SCHEMA_VERSIONS.iter().any(|&s| u64::from(s) == v) => v as u32,
        _ => {
            return Err(ProjectError::SchemaVersionUnsupported {
                found: version.to_string(),
                supported: SUPPORTED_SCHEMA_VERSIONS,
            })
        }
    };
    serde_json::from_str(text).map_err(|e| {
        let msg = e.to_string();
        match msg.strip_prefix("unknown field `").and_then(|rest| rest.split('`').next()) {
            Some(field) => ProjectError::UnknownField {
                field: field.to_string(),
                schema_version,
                line: e.line(),
                column: e.column(),
            },
            None => parse_error(e),
        }
    })
}

pub fn load(path: impl AsRef<Path>) -> Result<HoqProject, ProjectError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ProjectError::Io { path: path.to_path_buf(), source })?;
    HoqProject::from_json(&text)
}

/// Writes `contents` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), ProjectError> {
    let werr = |source| ProjectError::Write { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(werr)?;
    tmp.write_all(contents).map_err(werr)?;
    tmp.as_file().sync_all().map_err(werr)?;
    tmp.persist(path).map_err(|e| werr(e.error))?;
    Ok(())
}

pub fn save(project: &HoqProject, path: impl AsRef<Path>) -> Result<(), ProjectError> {
    write_atomic(path.as_ref(), project.to_json().as_bytes())
}

/// Requirement catalogs for a saffron solar dryer with synthetic,
/// illustrative judgments, relationship cells and roof correlations.
pub fn bundled_project() -> HoqProject {
    HoqProject::from_json(BUNDLED).expect("bundled project is valid")
}
