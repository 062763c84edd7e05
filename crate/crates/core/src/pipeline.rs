//! End-to-end runs over a project: AHP weights, then the House of Quality.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ahp::{analyze_hierarchy, AhpError, HierarchyAnalysis, SynthesisOptions, WeightMethod};
use crate::hoq::{rank, HoqError, PriorityReport};
use crate::project::{HoqProject, ProjectError, Selection, ValidationIssue};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Project(#[from] ProjectError),
    #[error("no respondent with id {0:?}")]
    UnknownRespondent(String),
    #[error(transparent)]
    Ahp(#[from] AhpError),
    #[error(transparent)]
    Hoq(#[from] HoqError),
}

impl PipelineError {
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Project(e) => e.code(),
            PipelineError::UnknownRespondent(_) => "UnknownRespondent",
            PipelineError::Ahp(e) => e.code(),
            PipelineError::Hoq(e) => e.code(),
        }
    }

    pub fn validation_issues(&self) -> Option<&[ValidationIssue]> {
        match self {
            PipelineError::Project(ProjectError::Validation(v)) => Some(v),
            _ => None,
        }
    }
}

/// Caller overrides on top of the project's own configuration.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub selection: Selection,
    pub method: Option<WeightMethod>,
    pub allow_inconsistent: Option<bool>,
}

impl RunOptions {
    pub fn synthesis(&self, project: &HoqProject) -> SynthesisOptions {
        let mut opts = project.config.synthesis_options();
        if let Some(m) = self.method {
            opts.method = m;
        }
        if let Some(a) = self.allow_inconsistent {
            opts.allow_inconsistent = a;
        }
        opts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AhpAnalysis {
    pub selection: String,
    pub method: WeightMethod,
    pub threshold: f64,
    #[serde(flatten)]
    pub hierarchy: HierarchyAnalysis,
    /// One line per matrix whose consistency ratio exceeds the threshold.
    pub warnings: Vec<String>,
}

pub fn analyze_ahp(project: &HoqProject, opts: &RunOptions) -> Result<AhpAnalysis, PipelineError> {
    project.ensure_valid()?;
    analyze_ahp_unchecked(project, opts)
}

/// Skips document validation; the caller guarantees a valid project.
pub(crate) fn analyze_ahp_unchecked(project: &HoqProject, opts: &RunOptions) -> Result<AhpAnalysis, PipelineError> {
    let synthesis = opts.synthesis(project);
    let hierarchy = project.hierarchy(&opts.selection).ok_or_else(|| match &opts.selection {
        Selection::Respondent(id) => PipelineError::UnknownRespondent(id.clone()),
        Selection::Group => unreachable!("group selection always resolves"),
    })??;
    let analysis = analyze_hierarchy(&hierarchy, &synthesis)?;
    let warnings = analysis
        .inconsistent()
        .map(|a| format!("{}: CR={:.2} exceeds {:.2}", a.label, a.consistency.cr, synthesis.threshold))
        .collect();
    Ok(AhpAnalysis {
        selection: opts.selection.to_string(),
        method: synthesis.method,
        threshold: synthesis.threshold,
        hierarchy: analysis,
        warnings,
    })
}

fn refused(analysis: &AhpAnalysis) -> AhpError {
    let worst = analysis
        .hierarchy
        .inconsistent()
        .max_by(|a, b| a.consistency.cr.total_cmp(&b.consistency.cr))
        .expect("synthesis is only refused for inconsistent matrices");
    AhpError::InconsistentInput { label: worst.label.clone(), cr: worst.consistency.cr, threshold: analysis.threshold }
}

pub fn rank_project(project: &HoqProject, opts: &RunOptions) -> Result<PriorityReport, PipelineError> {
    project.ensure_valid()?;
    rank_project_unchecked(project, opts)
}

pub(crate) fn rank_project_unchecked(project: &HoqProject, opts: &RunOptions) -> Result<PriorityReport, PipelineError> {
    let analysis = analyze_ahp_unchecked(project, opts)?;
    let weights = match &analysis.hierarchy.global {
        Some(w) => w.weights.clone(),
        None => return Err(refused(&analysis).into()),
    };
    let model = project.hoq_model(weights)?;
    Ok(rank(&model)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::project::bundled_project;

    #[test]
    fn bundled_runs_end_to_end() {
        let p = bundled_project();
        let a = analyze_ahp(&p, &RunOptions::default()).unwrap();
        assert!(a.warnings.is_empty());
        let g = a.hierarchy.global.unwrap();
        assert_eq!(g.len(), 14);
        assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let report = rank_project(&p, &RunOptions::default()).unwrap();
        let mut ranks = report.ranks();
        ranks.sort_unstable();
        assert_eq!(ranks, (1..=14).collect::<Vec<_>>());
    }

    #[test]
    fn unknown_respondent() {
        let p = bundled_project();
        let opts = RunOptions { selection: Selection::Respondent("R9".into()), ..Default::default() };
        assert_eq!(analyze_ahp(&p, &opts).unwrap_err().code(), "UnknownRespondent");
    }

    #[test]
    fn inconsistent_judgments_block_ranking_unless_allowed() {
        let mut p = bundled_project();
        let resp = &mut p.respondents[0];
        resp.criteria_matrix = vec![vec![1.0, 3.0, 0.5], vec![1.0 / 3.0, 1.0, 4.0], vec![2.0, 0.25, 1.0]];
        let opts = RunOptions { selection: Selection::Respondent("R1".into()), ..Default::default() };
        let a = analyze_ahp(&p, &opts).unwrap();
        assert_eq!(a.warnings, vec!["criteria: CR=1.06 exceeds 0.10".to_string()]);
        assert!(a.hierarchy.global.is_none());
        assert_eq!(rank_project(&p, &opts).unwrap_err().code(), "InconsistentInput");
        let lenient = RunOptions { allow_inconsistent: Some(true), ..opts };
        assert!(rank_project(&p, &lenient).is_ok());
    }
}
