//! Machine-readable tables, coverage ledgers and sieve tree exports.
//!
//! Every tabular report is a [`ReportDocument`]: metadata plus typed rows,
//! written as CSV (header row, comma separated, LF line endings) or JSON.

mod coverage;
mod decimal;
mod tables;
mod tree;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coverage::{coverage_report, CoverageRow};
pub use decimal::{exact_decimal, quarter_power_form};
pub use tables::{
    compare_counts, leaf_counts, pso_histogram, read_reference_column, table_summary,
    trajectory_table, ComparisonRow, Histogram, HistogramRow, ParityFilter, SummaryRow,
    TrajectoryRow,
};
pub use tree::{export_tree, ExportNode, ExportStatus, TreeDocument, TreeFormat};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported output extension for {0} (expected .csv or .json)")]
    Extension(String),
    #[error("reference file has no column named {0:?}")]
    MissingColumn(String),
    #[error("bad reference value {value:?} in column {column:?}")]
    BadReference { column: String, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub report: String,
    pub params: BTreeMap<String, String>,
}

impl Metadata {
    pub fn new(report: &str) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            report: report.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

/// A row type with a fixed CSV layout.
pub trait Tabular {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportDocument<T> {
    pub metadata: Metadata,
    pub rows: Vec<T>,
}

impl<T: Serialize + Tabular> ReportDocument<T> {
    pub fn new(metadata: Metadata, rows: Vec<T>) -> Self {
        ReportDocument { metadata, rows }
    }

    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(T::header())?;
        for row in &self.rows {
            w.write_record(row.record())?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Write CSV or JSON depending on the extension of `path`.
    pub fn write_to(&self, path: &Path) -> Result<(), ReportError> {
        let body = match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => self.to_csv()?,
            Some("json") => self.to_json()?,
            _ => return Err(ReportError::Extension(path.display().to_string())),
        };
        std::fs::write(path, body)?;
        Ok(())
    }
}
