//! Decision engine combining the analytic hierarchy process with a fuzzy
//! House of Quality.
//!
//! Customer-requirement weights are derived from pairwise judgments
//! ([`ahp`]), pushed through a House of Quality whose relationship and roof
//! cells are triangular fuzzy numbers ([`fuzzy`], [`hoq`]), and defuzzified
//! into a ranking of technical requirements. [`sensitivity`] measures how
//! stable that ranking is under perturbed judgments, and [`project`] and
//! [`table`] handle persistence and questionnaire tables.

pub mod ahp;
pub mod fuzzy;
pub mod hoq;
pub mod pipeline;
pub mod project;
pub mod sensitivity;
pub mod table;

pub use ahp::{ConsistencyReport, Hierarchy, PairwiseMatrix, WeightMethod, WeightVector};
pub use fuzzy::{CorrelationDegree, RelationshipDegree, Tfn};
pub use hoq::{HoqModel, PriorityReport, Requirement, Roof};
pub use pipeline::{analyze_ahp, rank_project, AhpAnalysis, PipelineError, RunOptions};
pub use project::{bundled_project, HoqProject, ProjectError, Selection};
pub use sensitivity::{run_sensitivity, PerturbationSpec, StabilityReport};
