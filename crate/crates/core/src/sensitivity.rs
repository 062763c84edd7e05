//! Monte-Carlo robustness of the technical-requirement ranking.
//!
//! Each trial perturbs a copy of the project along the discrete scales the
//! questionnaires use: a pairwise judgment moves one step on the 1-9 ladder
//! (reciprocal mirrored), a relationship cell moves one grade along
//! `None - Weak - Medium - Strong`, and optionally a roof cell moves one grade
//! along `None - Negative - Positive`. At either end of a ladder the only move
//! is inward. The full AHP and House of Quality pipeline is then rerun.
//!
//! Trial `t` draws from its own ChaCha8 stream `(seed, t)`, so reports do not
//! depend on thread scheduling. Trials whose pipeline fails are discarded and
//! counted by error code.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ahp::{nearest_scale_step, SAATY_SCALE};
use crate::fuzzy::{CorrelationDegree, RelationshipDegree};
use crate::pipeline::{rank_project_unchecked, PipelineError, RunOptions};
use crate::project::HoqProject;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    pub trials: usize,
    pub seed: u64,
    /// Probability that a judgment moves one scale step.
    pub judgment_step_prob: f64,
    /// Probability that a linguistic cell moves one grade.
    pub cell_flip_prob: f64,
    #[serde(default)]
    pub perturb_roof: bool,
}

#[derive(Debug, Error)]
pub enum SensitivityError {
    #[error("invalid perturbation spec: {0}")]
    InvalidSpec(String),
    #[error("baseline run failed: {0}")]
    Baseline(#[from] PipelineError),
}

impl SensitivityError {
    pub fn code(&self) -> &'static str {
        match self {
            SensitivityError::InvalidSpec(_) => "InvalidSpec",
            SensitivityError::Baseline(e) => e.code(),
        }
    }
}

impl PerturbationSpec {
    pub fn validate(&self) -> Result<(), SensitivityError> {
        if self.trials == 0 {
            return Err(SensitivityError::InvalidSpec("trials must be at least 1".into()));
        }
        for (name, p) in [("judgment_step_prob", self.judgment_step_prob), ("cell_flip_prob", self.cell_flip_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SensitivityError::InvalidSpec(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// A distinct ranking outcome and how many trials produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingCount {
    /// Ranks in catalog order.
    pub ranks: Vec<usize>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub trials: usize,
    pub valid_trials: usize,
    pub discarded: usize,
    /// Discarded trials per error code.
    pub discard_reasons: BTreeMap<String, usize>,
    pub tr_codes: Vec<String>,
    pub baseline_ranks: Vec<usize>,
    /// `rank_histogram[j][r]`: valid trials in which TR `j` had rank `r + 1`.
    pub rank_histogram: Vec<Vec<usize>>,
    pub top1_frequency: Vec<f64>,
    /// Symmetric; `[j][k]` counts valid trials where TRs `j` and `k` swapped
    /// relative order compared with the baseline.
    pub reversal_counts: Vec<Vec<usize>>,
    pub reversal_rate: Vec<Vec<f64>>,
    /// Distinct rankings, most frequent first, ties by ranks ascending.
    pub orderings: Vec<OrderingCount>,
}

fn step_ladder<R: Rng>(rng: &mut R, grade: usize, top: usize) -> usize {
    if grade == 0 {
        1
    } else if grade >= top {
        top - 1
    } else if rng.random_bool(0.5) {
        grade + 1
    } else {
        grade - 1
    }
}

fn perturb_matrix<R: Rng>(rng: &mut R, rows: &mut [Vec<f64>], p: f64) {
    let n = rows.len();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                let step = step_ladder(rng, nearest_scale_step(rows[i][j]), SAATY_SCALE.len() - 1);
                let v = SAATY_SCALE[step];
                rows[i][j] = v;
                rows[j][i] = 1.0 / v;
            }
        }
    }
}

/// Applies one trial's perturbation in a fixed traversal order: respondents,
/// each criteria matrix then local matrices by criterion; relationship grid
/// row-major; roof upper triangle row-major.
pub fn perturb<R: Rng>(project: &HoqProject, spec: &PerturbationSpec, rng: &mut R) -> HoqProject {
    let mut p = project.clone();
    if spec.judgment_step_prob > 0.0 {
        for resp in &mut p.respondents {
            perturb_matrix(rng, &mut resp.criteria_matrix, spec.judgment_step_prob);
            for c in &project.criteria {
                if let Some(rows) = resp.local_matrices.get_mut(&c.code) {
                    perturb_matrix(rng, rows, spec.judgment_step_prob);
                }
            }
        }
    }
    if spec.cell_flip_prob > 0.0 {
        let top = RelationshipDegree::LADDER.len() - 1;
        for row in &mut p.relationships {
            for cell in row.iter_mut() {
                if rng.random_bool(spec.cell_flip_prob) {
                    let g = step_ladder(rng, cell.grade(), top);
                    *cell = RelationshipDegree::from_grade(g).expect("grade on ladder");
                }
            }
        }
        if spec.perturb_roof {
            let top = CorrelationDegree::LADDER.len() - 1;
            let m = p.roof.len();
            for j in 0..m {
                for k in j + 1..m {
                    if rng.random_bool(spec.cell_flip_prob) {
                        let g = step_ladder(rng, p.roof[j][k].grade(), top);
                        let d = CorrelationDegree::from_grade(g).expect("grade on ladder");
                        p.roof[j][k] = d;
                        p.roof[k][j] = d;
                    }
                }
            }
        }
    }
    p
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn run_sensitivity(project: &HoqProject, spec: &PerturbationSpec) -> Result<StabilityReport, SensitivityError> {
    run_sensitivity_with(project, spec, &RunOptions::default())
}

pub fn run_sensitivity_with(
    project: &HoqProject,
    spec: &PerturbationSpec,
    opts: &RunOptions,
) -> Result<StabilityReport, SensitivityError> {
    spec.validate()?;
    project.ensure_valid().map_err(PipelineError::from)?;
    let baseline = rank_project_unchecked(project, opts)?;
    let baseline_ranks = baseline.ranks();
    let m = baseline_ranks.len();

    let outcomes: Vec<Result<Vec<usize>, &'static str>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(spec.seed, t);
            let perturbed = perturb(project, spec, &mut rng);
            rank_project_unchecked(&perturbed, opts).map(|r| r.ranks()).map_err(|e| e.code())
        })
        .collect();

    let mut discard_reasons = BTreeMap::new();
    let mut rank_histogram = vec![vec![0; m]; m];
    let mut reversal_counts = vec![vec![0; m]; m];
    let mut orderings: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut valid = 0;
    for outcome in outcomes {
        let ranks = match outcome {
            Ok(r) => r,
            Err(code) => {
                *discard_reasons.entry(code.to_string()).or_insert(0) += 1;
                continue;
            }
        };
        valid += 1;
        for (j, &r) in ranks.iter().enumerate() {
            rank_histogram[j][r - 1] += 1;
        }
        for j in 0..m {
            for k in j + 1..m {
                let before = baseline_ranks[j] < baseline_ranks[k];
                let after = ranks[j] < ranks[k];
                if before != after {
                    reversal_counts[j][k] += 1;
                    reversal_counts[k][j] += 1;
                }
            }
        }
        *orderings.entry(ranks).or_insert(0) += 1;
    }

    let freq = |c: usize| if valid == 0 { 0.0 } else { c as f64 / valid as f64 };
    let top1_frequency = rank_histogram.iter().map(|h| freq(h[0])).collect();
    let reversal_rate = reversal_counts.iter().map(|row| row.iter().map(|&c| freq(c)).collect()).collect();
    let mut orderings: Vec<OrderingCount> =
        orderings.into_iter().map(|(ranks, count)| OrderingCount { ranks, count }).collect();
    orderings.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.ranks.cmp(&b.ranks)));

    Ok(StabilityReport {
        trials: spec.trials,
        valid_trials: valid,
        discarded: spec.trials - valid,
        discard_reasons,
        tr_codes: project.trs.iter().map(|t| t.code.clone()).collect(),
        baseline_ranks,
        rank_histogram,
        top1_frequency,
        reversal_counts,
        reversal_rate,
        orderings,
    })
}
