//! Analytic hierarchy process: pairwise comparison matrices, priority weights,
//! consistency ratio, group aggregation and two-level synthesis.
//!
//! Weights come from the principal right eigenvector, found by power iteration
//! from a uniform start vector so results are reproducible. The geometric mean
//! of rows is available as an explicitly selected alternative.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for the diagonal and reciprocity checks.
pub const RECIPROCITY_TOLERANCE: f64 = 1e-9;

/// Conventional acceptance threshold for the consistency ratio.
pub const DEFAULT_CONSISTENCY_THRESHOLD: f64 = 0.10;

/// Saaty's random consistency index for n = 1..=15. Larger matrices reuse the
/// last entry.
pub const RANDOM_INDEX: [f64; 15] =
    [0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49, 1.51, 1.48, 1.56, 1.57, 1.59];

/// The 1-9 judgment scale with reciprocals, ascending.
pub const SAATY_SCALE: [f64; 17] = [
    1.0 / 9.0,
    1.0 / 8.0,
    1.0 / 7.0,
    1.0 / 6.0,
    1.0 / 5.0,
    1.0 / 4.0,
    1.0 / 3.0,
    1.0 / 2.0,
    1.0,
    2.0,
    3.0,
    4.0,
    5.0,
    6.0,
    7.0,
    8.0,
    9.0,
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AhpError {
    #[error("matrix must compare at least one element")]
    EmptyMatrix,
    #[error("element labels: expected {expected}, got {actual}")]
    LabelCount { expected: usize, actual: usize },
    #[error("judgment index ({i}, {j}) is invalid for a {n}x{n} matrix")]
    InvalidIndex { i: usize, j: usize, n: usize },
    #[error("missing judgment for pair ({i}, {j})")]
    MissingJudgment { i: usize, j: usize },
    #[error("duplicate judgment for pair ({i}, {j})")]
    DuplicateJudgment { i: usize, j: usize },
    #[error("judgment at ({i}, {j}) must be positive and finite, got {value}")]
    NonPositiveJudgment { i: usize, j: usize, value: f64 },
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("diagonal entry ({i}, {i}) is {value}, expected 1")]
    DiagonalNotOne { i: usize, value: f64 },
    #[error("entries ({i}, {j}) = {upper} and ({j}, {i}) = {lower} are not reciprocal")]
    NotReciprocal { i: usize, j: usize, upper: f64, lower: f64 },
    #[error("power iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },
    #[error("matrices disagree on shape or element order")]
    ShapeMismatch,
    #[error("group aggregation needs at least one matrix")]
    EmptyGroup,
    #[error("hierarchy: {0}")]
    InvalidHierarchy(String),
    #[error("{label}: CR={cr:.2} exceeds {threshold:.2}")]
    InconsistentInput { label: String, cr: f64, threshold: f64 },
}

impl AhpError {
    pub fn code(&self) -> &'static str {
        match self {
            AhpError::EmptyMatrix => "EmptyMatrix",
            AhpError::LabelCount { .. } => "LabelCount",
            AhpError::InvalidIndex { .. } => "InvalidIndex",
            AhpError::MissingJudgment { .. } => "MissingJudgment",
            AhpError::DuplicateJudgment { .. } => "DuplicateJudgment",
            AhpError::NonPositiveJudgment { .. } => "NonPositiveJudgment",
            AhpError::NotSquare { .. } => "NotSquare",
            AhpError::DiagonalNotOne { .. } => "DiagonalNotOne",
            AhpError::NotReciprocal { .. } => "NotReciprocal",
            AhpError::ConvergenceFailure { .. } => "ConvergenceFailure",
            AhpError::ShapeMismatch => "ShapeMismatch",
            AhpError::EmptyGroup => "EmptyGroup",
            AhpError::InvalidHierarchy(_) => "InvalidHierarchy",
            AhpError::InconsistentInput { .. } => "InconsistentInput",
        }
    }
}

/// One upper-triangle judgment: element `i` compared with element `j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Judgment {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

impl Judgment {
    pub fn new(i: usize, j: usize, value: f64) -> Self {
        Judgment { i, j, value }
    }
}

/// Square reciprocal judgment matrix with positive entries and unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairwiseMatrix {
    element_ids: Vec<String>,
    entries: Vec<Vec<f64>>,
}

fn default_ids(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("E{k}")).collect()
}

fn check_positive(i: usize, j: usize, value: f64) -> Result<(), AhpError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(AhpError::NonPositiveJudgment { i, j, value })
    }
}

impl PairwiseMatrix {
    /// Builds a matrix from upper-triangle judgments, filling the diagonal with
    /// ones and the lower triangle with reciprocals. Every pair `i < j` must be
    /// given exactly once.
    pub fn from_judgments(element_ids: Vec<String>, judgments: &[Judgment]) -> Result<Self, AhpError> {
        let n = element_ids.len();
        if n == 0 {
            return Err(AhpError::EmptyMatrix);
        }
        let mut slots: Vec<Vec<Option<f64>>> = vec![vec![None; n]; n];
        for jd in judgments {
            if jd.i >= jd.j || jd.j >= n {
                return Err(AhpError::InvalidIndex { i: jd.i, j: jd.j, n });
            }
            check_positive(jd.i, jd.j, jd.value)?;
            let slot = &mut slots[jd.i][jd.j];
            if slot.is_some() {
                return Err(AhpError::DuplicateJudgment { i: jd.i, j: jd.j });
            }
            *slot = Some(jd.value);
        }
        let mut entries = vec![vec![1.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = slots[i][j].ok_or(AhpError::MissingJudgment { i, j })?;
                entries[i][j] = v;
                entries[j][i] = 1.0 / v;
            }
        }
        Ok(PairwiseMatrix { element_ids, entries })
    }

    /// Validates a full matrix rather than auto-filling it.
    pub fn from_rows(element_ids: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, AhpError> {
        let n = rows.len();
        if n == 0 {
            return Err(AhpError::EmptyMatrix);
        }
        if element_ids.len() != n {
            return Err(AhpError::LabelCount { expected: n, actual: element_ids.len() });
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(AhpError::NotSquare { row, len: r.len(), n });
            }
        }
        for i in 0..n {
            let d = rows[i][i];
            if (d - 1.0).abs().is_nan() || (d - 1.0).abs() > RECIPROCITY_TOLERANCE {
                return Err(AhpError::DiagonalNotOne { i, value: d });
            }
            for j in 0..n {
                check_positive(i, j, rows[i][j])?;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (upper, lower) = (rows[i][j], rows[j][i]);
                if (lower - 1.0 / upper).abs() > RECIPROCITY_TOLERANCE {
                    return Err(AhpError::NotReciprocal { i, j, upper, lower });
                }
            }
        }
        Ok(PairwiseMatrix { element_ids, entries: rows })
    }

    /// Perfectly consistent matrix `a_ij = w_i / w_j`.
    pub fn from_weights(element_ids: Vec<String>, weights: &[f64]) -> Result<Self, AhpError> {
        let n = weights.len();
        if n == 0 {
            return Err(AhpError::EmptyMatrix);
        }
        if element_ids.len() != n {
            return Err(AhpError::LabelCount { expected: n, actual: element_ids.len() });
        }
        for (i, &w) in weights.iter().enumerate() {
            check_positive(i, i, w)?;
        }
        let entries =
            (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { weights[i] / weights[j] }).collect()).collect();
        Ok(PairwiseMatrix { element_ids, entries })
    }

    /// The all-equal matrix.
    pub fn identity(element_ids: Vec<String>) -> Result<Self, AhpError> {
        let n = element_ids.len();
        if n == 0 {
            return Err(AhpError::EmptyMatrix);
        }
        Ok(PairwiseMatrix { element_ids, entries: vec![vec![1.0; n]; n] })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn element_ids(&self) -> &[String] {
        &self.element_ids
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.entries
    }

    /// Sets `a_ij = value` and mirrors `a_ji = 1/value`.
    pub fn set_judgment(&mut self, i: usize, j: usize, value: f64) -> Result<(), AhpError> {
        let n = self.n();
        if i == j || i >= n || j >= n {
            return Err(AhpError::InvalidIndex { i, j, n });
        }
        check_positive(i, j, value)?;
        self.entries[i][j] = value;
        self.entries[j][i] = 1.0 / value;
        Ok(())
    }

    /// Applies the same permutation to rows, columns and labels:
    /// element `k` of the result is element `order[k]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> PairwiseMatrix {
        let element_ids = order.iter().map(|&k| self.element_ids[k].clone()).collect();
        let entries = order.iter().map(|&r| order.iter().map(|&c| self.entries[r][c]).collect()).collect();
        PairwiseMatrix { element_ids, entries }
    }

    fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.entries.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// True when `a_ik = a_ij * a_jk` for every triad, within `tol` relative.
    pub fn is_consistent(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let lhs = self.entries[i][k];
                    (lhs - self.entries[i][j] * self.entries[j][k]).abs() <= tol * lhs
                })
            })
        })
    }
}

impl<'de> Deserialize<'de> for PairwiseMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            element_ids: Vec<String>,
            entries: Vec<Vec<f64>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        PairwiseMatrix::from_rows(raw.element_ids, raw.entries).map_err(serde::de::Error::custom)
    }
}

/// Builds an `n x n` matrix with generated labels `E1..En`.
pub fn build_matrix(n: usize, upper_judgments: &[Judgment]) -> Result<PairwiseMatrix, AhpError> {
    PairwiseMatrix::from_judgments(default_ids(n), upper_judgments)
}

/// Priority weights, one per compared element, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub element_ids: Vec<String>,
    pub weights: Vec<f64>,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.element_ids.iter().position(|e| e == id).map(|k| self.weights[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMethod {
    /// Principal right eigenvector.
    #[default]
    Eigenvector,
    /// Normalized geometric mean of each row.
    Rowgeomean,
}

impl fmt::Display for WeightMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMethod::Eigenvector => "eigenvector",
            WeightMethod::Rowgeomean => "rowgeomean",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIteration {
    /// Convergence threshold on the max-norm of successive normalized iterates.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration { tolerance: 1e-10, max_iterations: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalEigen {
    /// Eigenvector normalized to sum one.
    pub vector: Vec<f64>,
    /// Rayleigh quotient at the converged vector.
    pub lambda_max: f64,
    pub iterations: usize,
}

pub fn principal_eigen(m: &PairwiseMatrix, params: &PowerIteration) -> Result<PrincipalEigen, AhpError> {
    let n = m.n();
    let mut x = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    loop {
        if iterations >= params.max_iterations {
            return Err(AhpError::ConvergenceFailure { iterations });
        }
        iterations += 1;
        let mut y = m.mul_vec(&x);
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|v| *v /= s);
        let delta = y.iter().zip(&x).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        x = y;
        if delta < params.tolerance {
            break;
        }
    }
    let ax = m.mul_vec(&x);
    let num: f64 = x.iter().zip(&ax).map(|(p, q)| p * q).sum();
    let den: f64 = x.iter().map(|p| p * p).sum();
    Ok(PrincipalEigen { vector: x, lambda_max: num / den, iterations })
}

pub fn row_geometric_mean(m: &PairwiseMatrix) -> Vec<f64> {
    let n = m.n() as f64;
    let raw: Vec<f64> = m.entries.iter().map(|row| (row.iter().map(|v| v.ln()).sum::<f64>() / n).exp()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

pub fn derive_weights(m: &PairwiseMatrix) -> Result<WeightVector, AhpError> {
    derive_weights_with(m, WeightMethod::Eigenvector, &PowerIteration::default())
}

pub fn derive_weights_with(
    m: &PairwiseMatrix,
    method: WeightMethod,
    params: &PowerIteration,
) -> Result<WeightVector, AhpError> {
    let weights = match method {
        WeightMethod::Eigenvector => principal_eigen(m, params)?.vector,
        WeightMethod::Rowgeomean => row_geometric_mean(m),
    };
    Ok(WeightVector { element_ids: m.element_ids.clone(), weights })
}

pub fn random_index(n: usize) -> f64 {
    match n {
        0 => 0.0,
        n => RANDOM_INDEX[(n - 1).min(RANDOM_INDEX.len() - 1)],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub lambda_max: f64,
    pub ci: f64,
    pub cr: f64,
    pub acceptable: bool,
}

pub fn consistency(m: &PairwiseMatrix) -> Result<ConsistencyReport, AhpError> {
    consistency_with(m, &PowerIteration::default(), DEFAULT_CONSISTENCY_THRESHOLD)
}

pub fn consistency_with(
    m: &PairwiseMatrix,
    params: &PowerIteration,
    threshold: f64,
) -> Result<ConsistencyReport, AhpError> {
    let eig = principal_eigen(m, params)?;
    Ok(consistency_from_eigen(m.n(), eig.lambda_max, threshold))
}

fn consistency_from_eigen(n: usize, lambda_max: f64, threshold: f64) -> ConsistencyReport {
    // Rounding can leave lambda_max a few ulps below n on consistent input.
    let ci = if n <= 2 { 0.0 } else { ((lambda_max - n as f64) / (n as f64 - 1.0)).max(0.0) };
    let ri = random_index(n);
    let cr = if ri == 0.0 { 0.0 } else { ci / ri };
    ConsistencyReport { lambda_max, ci, cr, acceptable: cr <= threshold }
}

/// Weights and consistency of one matrix, computed from a single eigen solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixAnalysis {
    pub label: String,
    pub weights: WeightVector,
    pub consistency: ConsistencyReport,
}

pub fn analyze_matrix(
    label: &str,
    m: &PairwiseMatrix,
    method: WeightMethod,
    params: &PowerIteration,
    threshold: f64,
) -> Result<MatrixAnalysis, AhpError> {
    let eig = principal_eigen(m, params)?;
    let consistency = consistency_from_eigen(m.n(), eig.lambda_max, threshold);
    let weights = match method {
        WeightMethod::Eigenvector => eig.vector,
        WeightMethod::Rowgeomean => row_geometric_mean(m),
    };
    Ok(MatrixAnalysis {
        label: label.to_string(),
        weights: WeightVector { element_ids: m.element_ids.clone(), weights },
        consistency,
    })
}

/// Element-wise geometric mean of individual judgment matrices.
pub fn aggregate_group(matrices: &[PairwiseMatrix]) -> Result<PairwiseMatrix, AhpError> {
    let first = matrices.first().ok_or(AhpError::EmptyGroup)?;
    if matrices.iter().any(|m| m.element_ids != first.element_ids) {
        return Err(AhpError::ShapeMismatch);
    }
    if matrices.len() == 1 {
        return Ok(first.clone());
    }
    let n = first.n();
    let k = matrices.len() as f64;
    let mut entries = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let log_mean = matrices.iter().map(|m| m.entries[i][j].ln()).sum::<f64>() / k;
            let v = log_mean.exp();
            entries[i][j] = v;
            entries[j][i] = 1.0 / v;
        }
    }
    Ok(PairwiseMatrix { element_ids: first.element_ids.clone(), entries })
}

/// Two-level hierarchy: criteria compared against the goal, and the customer
/// requirements compared under each criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    criteria: PairwiseMatrix,
    local: Vec<PairwiseMatrix>,
}

impl Hierarchy {
    pub fn new(criteria: PairwiseMatrix, local: Vec<PairwiseMatrix>) -> Result<Self, AhpError> {
        if local.len() != criteria.n() {
            return Err(AhpError::InvalidHierarchy(format!(
                "{} criteria but {} local matrices",
                criteria.n(),
                local.len()
            )));
        }
        if local.windows(2).any(|w| w[0].element_ids != w[1].element_ids) {
            return Err(AhpError::InvalidHierarchy("local matrices must compare the same ordered elements".into()));
        }
        Ok(Hierarchy { criteria, local })
    }

    pub fn criteria(&self) -> &PairwiseMatrix {
        &self.criteria
    }

    pub fn local(&self) -> &[PairwiseMatrix] {
        &self.local
    }

    /// Reorders criteria; element `k` of the result is criterion `order[k]`.
    pub fn with_criteria_order(&self, order: &[usize]) -> Hierarchy {
        Hierarchy {
            criteria: self.criteria.permuted(order),
            local: order.iter().map(|&k| self.local[k].clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    pub method: WeightMethod,
    pub power: PowerIteration,
    pub threshold: f64,
    pub allow_inconsistent: bool,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            method: WeightMethod::Eigenvector,
            power: PowerIteration::default(),
            threshold: DEFAULT_CONSISTENCY_THRESHOLD,
            allow_inconsistent: false,
        }
    }
}

/// Per-matrix analyses plus the global weights they combine into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyAnalysis {
    pub criteria: MatrixAnalysis,
    pub local: Vec<MatrixAnalysis>,
    /// Distributive synthesis; `None` when a matrix failed the consistency
    /// threshold and inconsistency was not allowed.
    pub global: Option<WeightVector>,
}

impl HierarchyAnalysis {
    pub fn inconsistent(&self) -> impl Iterator<Item = &MatrixAnalysis> {
        std::iter::once(&self.criteria).chain(&self.local).filter(|a| !a.consistency.acceptable)
    }
}

pub fn analyze_hierarchy(h: &Hierarchy, opts: &SynthesisOptions) -> Result<HierarchyAnalysis, AhpError> {
    let analyze = |label: &str, m: &PairwiseMatrix| analyze_matrix(label, m, opts.method, &opts.power, opts.threshold);
    let criteria = analyze("criteria", &h.criteria)?;
    let local =
        h.criteria.element_ids.iter().zip(&h.local).map(|(id, m)| analyze(id, m)).collect::<Result<Vec<_>, _>>()?;
    let acceptable = criteria.consistency.acceptable && local.iter().all(|a| a.consistency.acceptable);
    let global = (acceptable || opts.allow_inconsistent).then(|| combine(&criteria, &local));
    Ok(HierarchyAnalysis { criteria, local, global })
}

fn combine(criteria: &MatrixAnalysis, local: &[MatrixAnalysis]) -> WeightVector {
    let element_ids = local[0].weights.element_ids.clone();
    let mut weights = vec![0.0; element_ids.len()];
    for (cw, la) in criteria.weights.weights.iter().zip(local) {
        for (g, lw) in weights.iter_mut().zip(&la.weights.weights) {
            *g += cw * lw;
        }
    }
    WeightVector { element_ids, weights }
}

/// Global weight of each element: the criterion-weighted sum of its local weights.
pub fn synthesize(h: &Hierarchy, opts: &SynthesisOptions) -> Result<WeightVector, AhpError> {
    let analysis = analyze_hierarchy(h, opts)?;
    match analysis.global {
        Some(w) => Ok(w),
        None => {
            let worst = analysis
                .inconsistent()
                .max_by(|a, b| a.consistency.cr.total_cmp(&b.consistency.cr))
                .expect("refused synthesis has an inconsistent matrix");
            Err(AhpError::InconsistentInput {
                label: worst.label.clone(),
                cr: worst.consistency.cr,
                threshold: opts.threshold,
            })
        }
    }
}

/// Index of the scale value closest to `value` in log space.
pub fn nearest_scale_step(value: f64) -> usize {
    let lv = value.ln();
    let mut best = 0;
    for (k, s) in SAATY_SCALE.iter().enumerate() {
        if (s.ln() - lv).abs() < (SAATY_SCALE[best].ln() - lv).abs() {
            best = k;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        default_ids(n)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn build_two_by_two() {
        let m = build_matrix(2, &[Judgment::new(0, 1, 3.0)]).unwrap();
        assert_eq!(m.entries(), &[vec![1.0, 3.0], vec![1.0 / 3.0, 1.0]]);
    }

    #[test]
    fn build_consistent_three_by_three() {
        let m =
            build_matrix(3, &[Judgment::new(0, 1, 2.0), Judgment::new(0, 2, 4.0), Judgment::new(1, 2, 2.0)]).unwrap();
        assert!(m.is_consistent(1e-12));
        assert_eq!(m.get(2, 0), 0.25);
    }

    #[test]
    fn build_errors() {
        assert_eq!(build_matrix(2, &[]), Err(AhpError::MissingJudgment { i: 0, j: 1 }));
        assert_eq!(
            build_matrix(2, &[Judgment::new(0, 1, 2.0), Judgment::new(0, 1, 3.0)]),
            Err(AhpError::DuplicateJudgment { i: 0, j: 1 })
        );
        assert!(matches!(build_matrix(2, &[Judgment::new(0, 1, 0.0)]), Err(AhpError::NonPositiveJudgment { .. })));
        assert!(matches!(build_matrix(2, &[Judgment::new(1, 0, 2.0)]), Err(AhpError::InvalidIndex { .. })));
        assert_eq!(build_matrix(0, &[]), Err(AhpError::EmptyMatrix));
    }

    #[test]
    fn full_matrix_validation() {
        let bad = PairwiseMatrix::from_rows(ids(2), vec![vec![1.0, 3.0], vec![0.5, 1.0]]);
        assert!(matches!(bad, Err(AhpError::NotReciprocal { i: 0, j: 1, .. })));
        let diag = PairwiseMatrix::from_rows(ids(2), vec![vec![2.0, 3.0], vec![1.0 / 3.0, 1.0]]);
        assert!(matches!(diag, Err(AhpError::DiagonalNotOne { i: 0, .. })));
        let ragged = PairwiseMatrix::from_rows(ids(2), vec![vec![1.0], vec![1.0, 1.0]]);
        assert!(matches!(ragged, Err(AhpError::NotSquare { row: 0, .. })));
    }

    #[test]
    fn weights_two_by_two() {
        let m = build_matrix(2, &[Judgment::new(0, 1, 3.0)]).unwrap();
        let w = derive_weights(&m).unwrap();
        assert!(close(&w.weights, &[0.75, 0.25], 1e-12));
    }

    #[test]
    fn weights_recover_consistent_vector() {
        let m = PairwiseMatrix::from_weights(ids(3), &[0.5, 0.3, 0.2]).unwrap();
        let w = derive_weights(&m).unwrap();
        assert!(close(&w.weights, &[0.5, 0.3, 0.2], 1e-6));
        let g = derive_weights_with(&m, WeightMethod::Rowgeomean, &PowerIteration::default()).unwrap();
        assert!(close(&g.weights, &[0.5, 0.3, 0.2], 1e-12));
    }

    #[test]
    fn weights_single_element() {
        let m = build_matrix(1, &[]).unwrap();
        assert_eq!(derive_weights(&m).unwrap().weights, vec![1.0]);
        let c = consistency(&m).unwrap();
        assert_eq!((c.ci, c.cr, c.acceptable), (0.0, 0.0, true));
    }

    #[test]
    fn convergence_cap_is_reported() {
        let m = PairwiseMatrix::from_rows(
            ids(3),
            vec![vec![1.0, 3.0, 0.5], vec![1.0 / 3.0, 1.0, 4.0], vec![2.0, 0.25, 1.0]],
        )
        .unwrap();
        let params = PowerIteration { tolerance: 0.0, max_iterations: 5 };
        assert_eq!(
            derive_weights_with(&m, WeightMethod::Eigenvector, &params),
            Err(AhpError::ConvergenceFailure { iterations: 5 })
        );
    }

    #[test]
    fn consistency_of_consistent_matrix() {
        let m = PairwiseMatrix::from_rows(ids(3), vec![vec![1.0, 2.0, 4.0], vec![0.5, 1.0, 2.0], vec![0.25, 0.5, 1.0]])
            .unwrap();
        let c = consistency(&m).unwrap();
        assert!((c.lambda_max - 3.0).abs() < 1e-9);
        assert!(c.cr.abs() < 1e-9);
        assert!(c.acceptable);
    }

    #[test]
    fn consistency_of_inconsistent_matrix() {
        // Reference from a dense eigen solver: lambda_max = 4.2311797777901.
        let m = PairwiseMatrix::from_rows(
            ids(3),
            vec![vec![1.0, 3.0, 0.5], vec![1.0 / 3.0, 1.0, 4.0], vec![2.0, 0.25, 1.0]],
        )
        .unwrap();
        let c = consistency(&m).unwrap();
        assert!((c.lambda_max - 4.231_179_777_790_1).abs() < 1e-8, "{}", c.lambda_max);
        assert!((c.cr - 1.061_361_877_405_3).abs() < 1e-8);
        assert!(c.cr > 0.10);
        assert!(!c.acceptable);
    }

    #[test]
    fn random_index_table() {
        assert_eq!(random_index(1), 0.0);
        assert_eq!(random_index(3), 0.58);
        assert_eq!(random_index(10), 1.49);
        assert_eq!(random_index(14), 1.57);
        assert_eq!(random_index(40), 1.59);
    }

    #[test]
    fn aggregation_examples() {
        let a = build_matrix(2, &[Judgment::new(0, 1, 2.0)]).unwrap();
        let b = build_matrix(2, &[Judgment::new(0, 1, 8.0)]).unwrap();
        let g = aggregate_group(&[a.clone(), b]).unwrap();
        assert!((g.get(0, 1) - 4.0).abs() < 1e-12);
        assert!((g.get(1, 0) - 0.25).abs() < 1e-12);
        assert_eq!(aggregate_group(std::slice::from_ref(&a)).unwrap(), a);
        assert_eq!(aggregate_group(&[]), Err(AhpError::EmptyGroup));
        let c =
            build_matrix(3, &[Judgment::new(0, 1, 2.0), Judgment::new(0, 2, 2.0), Judgment::new(1, 2, 2.0)]).unwrap();
        assert_eq!(aggregate_group(&[a, c]), Err(AhpError::ShapeMismatch));
    }

    fn two_criteria() -> Hierarchy {
        let criteria = PairwiseMatrix::from_weights(vec!["c1".into(), "c2".into()], &[0.6, 0.4]).unwrap();
        let l1 = PairwiseMatrix::from_weights(ids(2), &[0.5, 0.5]).unwrap();
        let l2 = PairwiseMatrix::from_weights(ids(2), &[0.25, 0.75]).unwrap();
        Hierarchy::new(criteria, vec![l1, l2]).unwrap()
    }

    #[test]
    fn synthesis_weighted_sum() {
        let w = synthesize(&two_criteria(), &SynthesisOptions::default()).unwrap();
        assert!(close(&w.weights, &[0.40, 0.60], 1e-9));
        let swapped = synthesize(&two_criteria().with_criteria_order(&[1, 0]), &SynthesisOptions::default()).unwrap();
        assert!(close(&w.weights, &swapped.weights, 1e-9));
    }

    #[test]
    fn synthesis_single_criterion_and_identical_locals() {
        let local = PairwiseMatrix::from_weights(ids(3), &[0.2, 0.3, 0.5]).unwrap();
        let one = Hierarchy::new(PairwiseMatrix::identity(vec!["c".into()]).unwrap(), vec![local.clone()]).unwrap();
        let w = synthesize(&one, &SynthesisOptions::default()).unwrap();
        assert!(close(&w.weights, &[0.2, 0.3, 0.5], 1e-9));
        let criteria = PairwiseMatrix::from_weights(ids(3), &[0.7, 0.2, 0.1]).unwrap();
        let same = Hierarchy::new(criteria, vec![local.clone(), local.clone(), local]).unwrap();
        let w = synthesize(&same, &SynthesisOptions::default()).unwrap();
        assert!(close(&w.weights, &[0.2, 0.3, 0.5], 1e-9));
    }

    #[test]
    fn synthesis_refuses_inconsistent_input_unless_allowed() {
        let bad = PairwiseMatrix::from_rows(
            ids(3),
            vec![vec![1.0, 3.0, 0.5], vec![1.0 / 3.0, 1.0, 4.0], vec![2.0, 0.25, 1.0]],
        )
        .unwrap();
        let h = Hierarchy::new(PairwiseMatrix::identity(vec!["cost".into()]).unwrap(), vec![bad]).unwrap();
        let err = synthesize(&h, &SynthesisOptions::default()).unwrap_err();
        assert_eq!(err.code(), "InconsistentInput");
        assert!(err.to_string().contains("CR=1.06 exceeds 0.10"), "{err}");
        let opts = SynthesisOptions { allow_inconsistent: true, ..Default::default() };
        let w = synthesize(&h, &opts).unwrap();
        assert!((w.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hierarchy_shape_checks() {
        let criteria = PairwiseMatrix::identity(ids(2)).unwrap();
        let local = PairwiseMatrix::identity(ids(3)).unwrap();
        assert!(Hierarchy::new(criteria.clone(), vec![local.clone()]).is_err());
        let other = PairwiseMatrix::identity(vec!["x".into(), "y".into(), "z".into()]).unwrap();
        assert!(Hierarchy::new(criteria, vec![local, other]).is_err());
    }

    #[test]
    fn set_judgment_mirrors() {
        let mut m = PairwiseMatrix::identity(ids(3)).unwrap();
        m.set_judgment(2, 0, 5.0).unwrap();
        assert_eq!(m.get(2, 0), 5.0);
        assert_eq!(m.get(0, 2), 0.2);
        assert!(m.set_judgment(1, 1, 2.0).is_err());
    }

    #[test]
    fn scale_snapping() {
        assert_eq!(SAATY_SCALE[nearest_scale_step(3.0)], 3.0);
        assert_eq!(SAATY_SCALE[nearest_scale_step(1.0 / 7.0)], 1.0 / 7.0);
        assert_eq!(SAATY_SCALE[nearest_scale_step(40.0)], 9.0);
        assert_eq!(SAATY_SCALE[nearest_scale_step(1.05)], 1.0);
    }
}
