//! Fuzzy House of Quality.
//!
//! The pipeline for each technical requirement (TR) `j`:
//!
//! 1. relative importance `RI_j = Σ_i W_i ⊗ R_ij` over the customer requirements;
//! 2. roof adjustment `RI*_j = RI_j ⊕ Σ_{k≠j} T_kj ⊗ RI_k`;
//! 3. normalization `NRI*_j = RI*_j ⊘ RI*_max`, where `RI*_max` has the largest
//!    defuzzified value;
//! 4. crisp value `(a + 4b + c) / 6` of `NRI*_j`, and ranking by it.
//!
//! Sums run left to right in index order so results are bit-stable. Ties are
//! always broken towards the lower index.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{CorrelationDegree, FuzzyError, RelationshipDegree, Tfn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HoqError {
    #[error("model needs at least one customer requirement and one technical requirement")]
    EmptyModel,
    #[error("{what}: expected {expected}, got {actual}")]
    Shape { what: String, expected: usize, actual: usize },
    #[error("weight {index} must be nonnegative and finite, got {value}")]
    InvalidWeight { index: usize, value: f64 },
    #[error("roof diagonal cell ({0}, {0}) must be empty")]
    RoofDiagonal(usize),
    #[error("roof cells ({0}, {1}) and ({1}, {0}) differ")]
    RoofAsymmetric(usize, usize),
    #[error("roof index ({0}, {1}) out of range")]
    RoofIndex(usize, usize),
    #[error("normalization reference {index} has lower bound {a} <= 0; fuzzy division is undefined")]
    DegenerateDenominator { index: usize, a: f64 },
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

impl HoqError {
    pub fn code(&self) -> &'static str {
        match self {
            HoqError::EmptyModel => "EmptyModel",
            HoqError::Shape { .. } => "ShapeMismatch",
            HoqError::InvalidWeight { .. } => "InvalidWeight",
            HoqError::RoofDiagonal(_) => "RoofDiagonal",
            HoqError::RoofAsymmetric(..) => "RoofAsymmetric",
            HoqError::RoofIndex(..) => "InvalidIndex",
            HoqError::DegenerateDenominator { .. } => "DegenerateDenominator",
            HoqError::Fuzzy(e) => e.code(),
        }
    }
}

/// A customer or technical requirement: short code plus label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Requirement {
    pub code: String,
    pub label: String,
}

impl Requirement {
    pub fn new(code: impl Into<String>, label: impl Into<String>) -> Self {
        Requirement { code: code.into(), label: label.into() }
    }
}

/// Symmetric TR-TR correlations, stored as the strict upper triangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roof {
    m: usize,
    upper: Vec<CorrelationDegree>,
}

impl Roof {
    pub fn empty(m: usize) -> Self {
        Roof { m, upper: vec![CorrelationDegree::None; m * m.saturating_sub(1) / 2] }
    }

    /// Reads a full `m x m` grid, which must be symmetric with an empty diagonal.
    pub fn from_grid(grid: &[Vec<CorrelationDegree>]) -> Result<Self, HoqError> {
        let m = grid.len();
        for row in grid {
            if row.len() != m {
                return Err(HoqError::Shape { what: "roof row length".into(), expected: m, actual: row.len() });
            }
        }
        let mut roof = Roof::empty(m);
        for j in 0..m {
            if grid[j][j] != CorrelationDegree::None {
                return Err(HoqError::RoofDiagonal(j));
            }
            for k in j + 1..m {
                if grid[j][k] != grid[k][j] {
                    return Err(HoqError::RoofAsymmetric(j, k));
                }
                roof.set(j, k, grid[j][k])?;
            }
        }
        Ok(roof)
    }

    pub fn size(&self) -> usize {
        self.m
    }

    fn slot(&self, j: usize, k: usize) -> usize {
        let (r, c) = if j < k { (j, k) } else { (k, j) };
        r * self.m - r * (r + 1) / 2 + (c - r - 1)
    }

    pub fn get(&self, j: usize, k: usize) -> CorrelationDegree {
        if j == k || j >= self.m || k >= self.m {
            CorrelationDegree::None
        } else {
            self.upper[self.slot(j, k)]
        }
    }

    /// Sets the correlation between `j` and `k` (both orientations).
    pub fn set(&mut self, j: usize, k: usize, d: CorrelationDegree) -> Result<(), HoqError> {
        if j >= self.m || k >= self.m {
            return Err(HoqError::RoofIndex(j, k));
        }
        if j == k {
            return Err(HoqError::RoofDiagonal(j));
        }
        let s = self.slot(j, k);
        self.upper[s] = d;
        Ok(())
    }

    pub fn to_grid(&self) -> Vec<Vec<CorrelationDegree>> {
        (0..self.m).map(|j| (0..self.m).map(|k| self.get(j, k)).collect()).collect()
    }

    /// Strict upper triangle pairs `(j, k)` with `j < k`, row-major.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.m).flat_map(move |j| (j + 1..self.m).map(move |k| (j, k)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoqModel {
    crs: Vec<Requirement>,
    trs: Vec<Requirement>,
    weights: Vec<f64>,
    relationships: Vec<Vec<RelationshipDegree>>,
    roof: Roof,
}

impl HoqModel {
    /// `weights` are the customer-requirement priorities; any nonnegative
    /// vector is accepted, though AHP output sums to one.
    pub fn new(
        crs: Vec<Requirement>,
        trs: Vec<Requirement>,
        weights: Vec<f64>,
        relationships: Vec<Vec<RelationshipDegree>>,
        roof: Roof,
    ) -> Result<Self, HoqError> {
        let (n, m) = (crs.len(), trs.len());
        if n == 0 || m == 0 {
            return Err(HoqError::EmptyModel);
        }
        if weights.len() != n {
            return Err(HoqError::Shape { what: "weights".into(), expected: n, actual: weights.len() });
        }
        for (index, &value) in weights.iter().enumerate() {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(HoqError::InvalidWeight { index, value });
            }
        }
        if relationships.len() != n {
            return Err(HoqError::Shape { what: "relationship rows".into(), expected: n, actual: relationships.len() });
        }
        for row in &relationships {
            if row.len() != m {
                return Err(HoqError::Shape { what: "relationship columns".into(), expected: m, actual: row.len() });
            }
        }
        if roof.size() != m {
            return Err(HoqError::Shape { what: "roof".into(), expected: m, actual: roof.size() });
        }
        Ok(HoqModel { crs, trs, weights, relationships, roof })
    }

    pub fn crs(&self) -> &[Requirement] {
        &self.crs
    }

    pub fn trs(&self) -> &[Requirement] {
        &self.trs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn relationships(&self) -> &[Vec<RelationshipDegree>] {
        &self.relationships
    }

    pub fn roof(&self) -> &Roof {
        &self.roof
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self, HoqError> {
        HoqModel::new(self.crs.clone(), self.trs.clone(), weights, self.relationships.clone(), self.roof.clone())
    }
}

pub fn relative_importance(model: &HoqModel) -> Vec<Tfn> {
    (0..model.trs.len())
        .map(|j| {
            model
                .weights
                .iter()
                .zip(&model.relationships)
                .map(|(&w, row)| row[j].tfn().scale(w).expect("weights validated nonnegative"))
                .sum()
        })
        .collect()
}

pub fn roof_adjusted(model: &HoqModel, ri: &[Tfn]) -> Result<Vec<Tfn>, HoqError> {
    let m = model.trs.len();
    if ri.len() != m {
        return Err(HoqError::Shape { what: "relative importance".into(), expected: m, actual: ri.len() });
    }
    (0..m)
        .map(|j| {
            let mut acc = ri[j];
            for (k, rk) in ri.iter().enumerate() {
                if k != j {
                    acc = acc + model.roof.get(k, j).tfn().mul(rk)?;
                }
            }
            Ok(acc)
        })
        .collect()
}

/// Index of the largest defuzzified value; the lowest index wins ties.
pub fn defuzzified_argmax(values: &[Tfn]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (k, v) in values.iter().enumerate() {
        match best {
            Some(b) if v.defuzzify() <= values[b].defuzzify() => {}
            _ => best = Some(k),
        }
    }
    best
}

/// Fuzzy division of every value by the one with the largest defuzzified value.
pub fn normalize(ri_star: &[Tfn]) -> Result<Vec<Tfn>, HoqError> {
    let index = defuzzified_argmax(ri_star).ok_or(HoqError::EmptyModel)?;
    let reference = ri_star[index];
    if reference.a() <= 0.0 {
        return Err(HoqError::DegenerateDenominator { index, a: reference.a() });
    }
    Ok(ri_star.iter().map(|t| t.div(&reference)).collect::<Result<Vec<_>, _>>()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    FuzzyDivision,
    /// The reference had a nonpositive lower bound; every value was instead
    /// scaled by the reciprocal of the reference's upper bound.
    ScalarFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mode: NormalizationMode,
    pub reference: usize,
}

/// Like [`normalize`], but falls back to scalar division instead of failing.
pub fn normalize_or_fallback(ri_star: &[Tfn]) -> Result<(Vec<Tfn>, Normalization), HoqError> {
    match normalize(ri_star) {
        Ok(v) => {
            let reference = defuzzified_argmax(ri_star).expect("nonempty");
            Ok((v, Normalization { mode: NormalizationMode::FuzzyDivision, reference }))
        }
        Err(HoqError::DegenerateDenominator { index, .. }) => {
            let c = ri_star[index].c();
            let factor = if c > 0.0 { 1.0 / c } else { 0.0 };
            let scaled = ri_star.iter().map(|t| t.scale(factor)).collect::<Result<Vec<_>, _>>()?;
            Ok((scaled, Normalization { mode: NormalizationMode::ScalarFallback, reference: index }))
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrPriority {
    pub code: String,
    pub label: String,
    pub ri: Tfn,
    pub ri_star: Tfn,
    pub nri_star: Tfn,
    /// Defuzzified `ri_star`, before normalization.
    pub crisp_ri_star: f64,
    pub crisp: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub code: String,
    pub crisp: f64,
}

/// Per-TR priorities in catalog order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorityReport {
    pub priorities: Vec<TrPriority>,
    pub normalization: Normalization,
}

impl PriorityReport {
    /// Priorities ordered by rank.
    pub fn ranked(&self) -> Vec<&TrPriority> {
        let mut v: Vec<&TrPriority> = self.priorities.iter().collect();
        v.sort_by_key(|p| p.rank);
        v
    }

    /// `(code, crisp)` pairs in descending crisp order.
    pub fn plot_series(&self) -> Vec<PlotPoint> {
        self.ranked().into_iter().map(|p| PlotPoint { code: p.code.clone(), crisp: p.crisp }).collect()
    }

    /// Ranks in catalog order.
    pub fn ranks(&self) -> Vec<usize> {
        self.priorities.iter().map(|p| p.rank).collect()
    }
}

/// Ranks for `scores`: 1 for the largest, ties resolved by ascending index.
pub fn ranks_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&x, &y| scores[y].total_cmp(&scores[x]));
    let mut ranks = vec![0; scores.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos + 1;
    }
    ranks
}

pub fn rank(model: &HoqModel) -> Result<PriorityReport, HoqError> {
    let ri = relative_importance(model);
    let ri_star = roof_adjusted(model, &ri)?;
    let (nri_star, normalization) = normalize_or_fallback(&ri_star)?;
    let crisp: Vec<f64> = nri_star.iter().map(Tfn::defuzzify).collect();
    let ranks = ranks_descending(&crisp);
    let priorities = model
        .trs
        .iter()
        .enumerate()
        .map(|(j, tr)| TrPriority {
            code: tr.code.clone(),
            label: tr.label.clone(),
            ri: ri[j],
            ri_star: ri_star[j],
            nri_star: nri_star[j],
            crisp_ri_star: ri_star[j].defuzzify(),
            crisp: crisp[j],
            rank: ranks[j],
        })
        .collect();
    Ok(PriorityReport { priorities, normalization })
}
