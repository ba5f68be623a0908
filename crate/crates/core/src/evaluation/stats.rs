//! Boxplot summaries of absolute biometry error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative error accepted in routine clinical biometry (±15 %).
pub const CLINICAL_TOLERANCE: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub measurement: String,
    pub count: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub outliers: Vec<f64>,
    pub mean: f64,
    /// Share of pairs with `|predicted − clinical| <= 0.15 · clinical`.
    pub within_tolerance_rate: f64,
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Tukey boxplot statistics of `|predicted − clinical|` in mm.
///
/// Quartiles are Tukey's hinges: the medians of the lower and upper halves, with
/// the median itself belonging to both halves when the count is odd. Whiskers
/// end at the most extreme errors inside `[q1 − 1.5 IQR, q3 + 1.5 IQR]`;
/// everything beyond is an outlier.
pub fn error_stats(pairs: &[(f64, f64)], measurement: &str) -> Result<ErrorStats> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&(_, c)) = pairs
        .iter()
        .find(|&&(p, c)| !p.is_finite() || !c.is_finite() || c <= 0.0)
    {
        return Err(Error::InvalidInput(format!(
            "clinical {measurement} values must be positive and finite, got {c}"
        )));
    }

    let mut errors: Vec<f64> = pairs.iter().map(|(p, c)| (p - c).abs()).collect();
    errors.sort_by(f64::total_cmp);
    let n = errors.len();
    let half = n.div_ceil(2);
    let median = median_sorted(&errors);
    let q1 = median_sorted(&errors[..half]);
    let q3 = median_sorted(&errors[n - half..]);
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside = |e: &&f64| **e >= lo_fence && **e <= hi_fence;
    let whisker_low = errors.iter().find(inside).copied().unwrap_or(q1);
    let whisker_high = errors.iter().rev().find(inside).copied().unwrap_or(q3);
    let outliers = errors
        .iter()
        .copied()
        .filter(|e| *e < lo_fence || *e > hi_fence)
        .collect();

    let within = pairs
        .iter()
        .filter(|(p, c)| (p - c).abs() <= CLINICAL_TOLERANCE * c)
        .count();

    Ok(ErrorStats {
        measurement: measurement.to_string(),
        count: n,
        median,
        q1,
        q3,
        whisker_low,
        whisker_high,
        outliers,
        mean: errors.iter().sum::<f64>() / n as f64,
        within_tolerance_rate: within as f64 / n as f64,
    })
}
