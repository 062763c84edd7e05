//! Delimiter-separated tables: questionnaire import and report export.
//!
//! Imported tables carry a header row of column codes (the top-left cell is
//! ignored) and one row per element, starting with the row code:
//!
//! ```text
//! ,CR1,CR2,CR3
//! CR1,1,3,1/2
//! CR2,,1,4
//! CR3,,,1
//! ```
//!
//! Judgments may be written as decimals or fractions (`1/3`). Relationship
//! grids use `S`, `M`, `W` or blank; roof grids use `+`, `-` or blank.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ahp::{AhpError, Judgment, PairwiseMatrix};
use crate::fuzzy::{CorrelationDegree, RelationshipDegree, UnknownToken};
use crate::hoq::{PriorityReport, Roof};
use crate::sensitivity::StabilityReport;

#[derive(Debug, Error)]
pub enum ImportError {
    #[error("cannot read table: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed table: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}, column {column}: {source}")]
    UnknownLinguisticToken {
        row: usize,
        column: usize,
        #[source]
        source: UnknownToken,
    },
    #[error("row {row}, column {column}: cannot read {text:?} as a number")]
    BadNumber { row: usize, column: usize, text: String },
    #[error("row {row}, column {column}: a judgment is required")]
    MissingValue { row: usize, column: usize },
    #[error("table shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Matrix(#[from] AhpError),
}

impl ImportError {
    pub fn code(&self) -> &'static str {
        match self {
            ImportError::Io(_) => "CannotOpen",
            ImportError::Csv(_) => "ParseError",
            ImportError::UnknownLinguisticToken { .. } => "UnknownLinguisticToken",
            ImportError::BadNumber { .. } => "BadNumber",
            ImportError::MissingValue { .. } => "MissingJudgment",
            ImportError::Shape(_) => "ShapeMismatch",
            ImportError::Matrix(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableKind {
    /// Upper triangle only; diagonal and lower triangle are filled in.
    PairwiseUpper,
    /// Full matrix, checked for reciprocity.
    PairwiseFull,
    Relationships,
    /// Symmetric roof; either triangle (or both, if they agree) may be given.
    Roof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    pub row_codes: Vec<String>,
    pub column_codes: Vec<String>,
    pub cells: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Imported {
    Matrix(PairwiseMatrix),
    Relationships(Grid<RelationshipDegree>),
    Roof { codes: Vec<String>, roof: Roof },
}

struct RawTable {
    columns: Vec<String>,
    rows: Vec<(String, Vec<String>)>,
}

fn read_raw(reader: impl Read, delimiter: u8) -> Result<RawTable, ImportError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).delimiter(delimiter).from_reader(reader);
    let mut records = rdr.records();
    let header = records.next().ok_or_else(|| ImportError::Shape("table is empty".into()))??;
    let columns: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    let mut rows = Vec::new();
    for (k, rec) in records.enumerate() {
        let rec = rec?;
        if rec.iter().all(|c| c.trim().is_empty()) {
            continue;
        }
        let mut cells: Vec<String> = rec.iter().skip(1).map(|s| s.trim().to_string()).collect();
        if cells.len() > columns.len() {
            return Err(ImportError::Shape(format!(
                "row {} has {} cells but the header names {} columns",
                k + 2,
                cells.len(),
                columns.len()
            )));
        }
        cells.resize(columns.len(), String::new());
        rows.push((rec.get(0).unwrap_or("").trim().to_string(), cells));
    }
    Ok(RawTable { columns, rows })
}

fn parse_number(text: &str, row: usize, column: usize) -> Result<f64, ImportError> {
    let bad = || ImportError::BadNumber { row, column, text: text.to_string() };
    let v = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            num / den
        }
        None => text.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

impl RawTable {
    fn require_square(&self) -> Result<Vec<String>, ImportError> {
        let row_codes: Vec<String> = self.rows.iter().map(|(c, _)| c.clone()).collect();
        if row_codes != self.columns {
            return Err(ImportError::Shape(format!(
                "row codes {row_codes:?} must match column codes {:?}",
                self.columns
            )));
        }
        Ok(row_codes)
    }

    // File positions are 1-based and include the header row and code column.
    fn cell(&self, i: usize, j: usize) -> (&str, usize, usize) {
        (self.rows[i].1[j].as_str(), i + 2, j + 2)
    }
}

pub fn import_table(reader: impl Read, kind: TableKind, delimiter: u8) -> Result<Imported, ImportError> {
    let raw = read_raw(reader, delimiter)?;
    match kind {
        TableKind::PairwiseUpper => {
            let codes = raw.require_square()?;
            let n = codes.len();
            let mut judgments = Vec::new();
            for i in 0..n {
                let (diag, r, c) = raw.cell(i, i);
                if !diag.is_empty() && parse_number(diag, r, c)? != 1.0 {
                    return Err(AhpError::DiagonalNotOne { i, value: parse_number(diag, r, c)? }.into());
                }
                for j in i + 1..n {
                    let (text, r, c) = raw.cell(i, j);
                    if text.is_empty() {
                        return Err(ImportError::MissingValue { row: r, column: c });
                    }
                    judgments.push(Judgment::new(i, j, parse_number(text, r, c)?));
                }
            }
            Ok(Imported::Matrix(PairwiseMatrix::from_judgments(codes, &judgments)?))
        }
        TableKind::PairwiseFull => {
            let codes = raw.require_square()?;
            let n = codes.len();
            let mut rows = vec![vec![0.0; n]; n];
            for (i, row) in rows.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    let (text, r, c) = raw.cell(i, j);
                    if text.is_empty() {
                        return Err(ImportError::MissingValue { row: r, column: c });
                    }
                    *v = parse_number(text, r, c)?;
                }
            }
            Ok(Imported::Matrix(PairwiseMatrix::from_rows(codes, rows)?))
        }
        TableKind::Relationships => {
            let cells =
                (0..raw.rows.len())
                    .map(|i| {
                        (0..raw.columns.len())
                            .map(|j| {
                                let (text, row, column) = raw.cell(i, j);
                                text.parse::<RelationshipDegree>()
                                    .map_err(|source| ImportError::UnknownLinguisticToken { row, column, source })
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .collect::<Result<Vec<_>, _>>()?;
            Ok(Imported::Relationships(Grid {
                row_codes: raw.rows.iter().map(|(c, _)| c.clone()).collect(),
                column_codes: raw.columns.clone(),
                cells,
            }))
        }
        TableKind::Roof => {
            let codes = raw.require_square()?;
            let m = codes.len();
            let mut grid = vec![vec![CorrelationDegree::None; m]; m];
            for (i, row) in grid.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    let (text, r, c) = raw.cell(i, j);
                    *v = text.parse().map_err(|source| ImportError::UnknownLinguisticToken {
                        row: r,
                        column: c,
                        source,
                    })?;
                }
            }
            let mut roof = Roof::empty(m);
            for j in 0..m {
                if grid[j][j] != CorrelationDegree::None {
                    return Err(ImportError::Shape(format!("diagonal cell for {} must be blank", codes[j])));
                }
                for k in j + 1..m {
                    let (upper, lower) = (grid[j][k], grid[k][j]);
                    let d = match (upper, lower) {
                        (u, CorrelationDegree::None) => u,
                        (CorrelationDegree::None, l) => l,
                        (u, l) if u == l => u,
                        _ => {
                            return Err(ImportError::Shape(format!(
                                "cells ({}, {}) and ({}, {}) disagree",
                                codes[j], codes[k], codes[k], codes[j]
                            )))
                        }
                    };
                    roof.set(j, k, d).expect("indices in range");
                }
            }
            Ok(Imported::Roof { codes, roof })
        }
    }
}

pub fn import_matrix_csv(path: impl AsRef<Path>, kind: TableKind) -> Result<Imported, ImportError> {
    let path = path.as_ref();
    let delimiter = match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") | Some("tab") => b'\t',
        _ => b',',
    };
    import_table(std::fs::File::open(path)?, kind, delimiter)
}

fn tfn_fields(t: &crate::fuzzy::Tfn) -> [String; 3] {
    t.components().map(|v| v.to_string())
}

/// Full-precision priority table in catalog order.
pub fn write_priority_table(report: &PriorityReport, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "code",
        "label",
        "ri_a",
        "ri_b",
        "ri_c",
        "ri_star_a",
        "ri_star_b",
        "ri_star_c",
        "nri_star_a",
        "nri_star_b",
        "nri_star_c",
        "crisp_ri_star",
        "crisp",
        "rank",
    ])?;
    for p in &report.priorities {
        let mut rec = vec![p.code.clone(), p.label.clone()];
        rec.extend(tfn_fields(&p.ri));
        rec.extend(tfn_fields(&p.ri_star));
        rec.extend(tfn_fields(&p.nri_star));
        rec.push(p.crisp_ri_star.to_string());
        rec.push(p.crisp.to_string());
        rec.push(p.rank.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `(code, crisp)` rows in descending crisp order, one per TR.
pub fn write_plot_data(report: &PriorityReport, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["code", "crisp"])?;
    for p in report.plot_series() {
        w.write_record([p.code, p.crisp.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rank histogram: one row per TR, one column per rank.
pub fn write_rank_histogram(report: &StabilityReport, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let m = report.tr_codes.len();
    let mut header = vec!["code".to_string(), "baseline_rank".into(), "top1_frequency".into()];
    header.extend((1..=m).map(|r| format!("rank_{r}")));
    w.write_record(&header)?;
    for (j, code) in report.tr_codes.iter().enumerate() {
        let mut rec = vec![code.clone(), report.baseline_ranks[j].to_string(), report.top1_frequency[j].to_string()];
        rec.extend(report.rank_histogram[j].iter().map(|c| c.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Pairwise reversal rates, one row per unordered TR pair.
pub fn write_reversals(report: &StabilityReport, out: impl Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["first", "second", "reversals", "rate"])?;
    let m = report.tr_codes.len();
    for j in 0..m {
        for k in j + 1..m {
            w.write_record([
                report.tr_codes[j].clone(),
                report.tr_codes[k].clone(),
                report.reversal_counts[j][k].to_string(),
                report.reversal_rate[j][k].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
