//! CSV and JSON formats for avalanche records, histograms and fit reports.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::compare::LrtResult;
use super::dynamics::AvalancheRecord;
use super::powerlaw::PowerLawFit;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("input has no `size` column")]
    MissingSizeColumn,
    #[error("line {line}: `{value}` is not a non-negative integer")]
    BadSize { line: u64, value: String },
    #[error("input has no records")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// `index,size` with a header row.
pub fn write_avalanche_csv<W: Write>(records: &[AvalancheRecord], out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(["index", "size"])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads the `size` column of a CSV with a header row.
pub fn read_sizes_csv<R: Read>(input: R) -> Result<Vec<u64>, IoError> {
    let mut rdr = csv::Reader::from_reader(input);
    let col = rdr
        .headers()?
        .iter()
        .position(|h| h.trim() == "size")
        .ok_or(IoError::MissingSizeColumn)?;
    let mut sizes = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = rec.get(col).unwrap_or("").trim();
        let line = rec.position().map_or(0, |p| p.line());
        sizes.push(
            field.parse().map_err(|_| IoError::BadSize { line, value: field.to_string() })?,
        );
    }
    if sizes.is_empty() {
        return Err(IoError::Empty);
    }
    Ok(sizes)
}

/// `size,probability` with a header row.
pub fn write_histogram_csv<W: Write>(hist: &[(u64, f64)], out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["size", "probability"])?;
    for &(size, p) in hist {
        w.serialize((size, p))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub x_min: u64,
    pub alpha: f64,
    pub ks: f64,
    pub n_tail: usize,
    pub lrt: Vec<LrtResult>,
    pub bootstrap_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub warning: Option<String>,
}

impl FitReport {
    pub fn new(fit: &PowerLawFit, lrt: Vec<LrtResult>, bootstrap_p: Option<f64>) -> Self {
        FitReport {
            x_min: fit.x_min,
            alpha: fit.alpha,
            ks: fit.ks,
            n_tail: fit.n_tail,
            lrt,
            bootstrap_p,
            warning: fit.warning.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String, IoError> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
