//! The batch report document and its canonical JSON encoding.
//!
//! Canonical JSON has sorted object keys, two-space indentation, a trailing
//! newline and every non-integer number rounded to six significant digits, so
//! identical inputs always produce identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::biometry::BiometryReport;
use crate::error::{Error, Result};
use crate::evaluation::{ErrorStats, SegMetrics};

pub const SIGNIFICANT_DIGITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ReportEntry {
    Ok { report: BiometryReport },
    Error { code: String, message: String },
}

impl ReportEntry {
    pub fn from_result(result: Result<BiometryReport>) -> Self {
        match result {
            Ok(report) => ReportEntry::Ok { report },
            Err(e) => ReportEntry::Error {
                code: e.code().to_string(),
                message: e.to_string(),
            },
        }
    }

    pub fn report(&self) -> Option<&BiometryReport> {
        match self {
            ReportEntry::Ok { report } => Some(report),
            ReportEntry::Error { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub total: usize,
    pub succeeded: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub summary: BatchSummary,
    /// Keyed by image id (mask file stem).
    pub entries: BTreeMap<String, ReportEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<SegMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_stats: Option<BTreeMap<String, ErrorStats>>,
}

impl ReportDocument {
    pub fn new(entries: BTreeMap<String, ReportEntry>) -> Self {
        let succeeded = entries.values().filter(|e| e.report().is_some()).count();
        ReportDocument {
            tool: "fetbio".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            summary: BatchSummary {
                total: entries.len(),
                succeeded,
                failed: entries.len() - succeeded,
            },
            entries,
            metrics: None,
            error_stats: None,
        }
    }
}

/// Rounds to `digits` significant digits.
pub fn round_significant(value: f64, digits: usize) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    format!("{:.*e}", digits.saturating_sub(1), value)
        .parse()
        .unwrap_or(value)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64() {
                if let Some(r) =
                    serde_json::Number::from_f64(round_significant(f, SIGNIFICANT_DIGITS))
                {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Canonical JSON text for any serialisable value.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    std::fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ReportDocument> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::UnreadableFile {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok(serde_json::from_str(&text)?)
}
