use serde::{Deserialize, Serialize};

use super::ncc::{match_template, ncc_at};
use super::{GrayImage, RulerTemplates, SizeClass};
use crate::error::{Error, Result};

/// Knobs for ruler detection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RulerConfig {
    /// Fraction of the image width, from the left edge, searched for markers.
    pub band_fraction: f64,
    pub ncc_threshold: f64,
    /// Forces the marker interval instead of inferring it from marker sizes.
    pub interval_override_mm: Option<u32>,
    /// Largest accepted coefficient of variation of the marker gaps.
    pub max_gap_cv: f64,
}

impl Default for RulerConfig {
    fn default() -> Self {
        RulerConfig {
            band_fraction: 0.12,
            ncc_threshold: 0.7,
            interval_override_mm: None,
            max_gap_cv: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub x: f64,
    pub y: f64,
    pub score: f64,
    pub size: SizeClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulerDetection {
    /// Sorted top to bottom.
    pub markers: Vec<Marker>,
    /// Median gap between consecutive markers.
    pub spacing_px: f64,
    /// Physical distance between consecutive markers, 5 or 10 mm.
    pub interval_mm: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleSource {
    Ruler,
    FixedOverride,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleEstimate {
    pub px_per_mm: f64,
    pub source: ScaleSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<RulerDetection>,
}

impl ScaleEstimate {
    pub fn fixed(px_per_mm: f64) -> Result<Self> {
        if !(px_per_mm.is_finite() && px_per_mm > 0.0) {
            return Err(Error::InvalidInput(format!(
                "px/mm must be positive, got {px_per_mm}"
            )));
        }
        Ok(ScaleEstimate {
            px_per_mm,
            source: ScaleSource::FixedOverride,
            detection: None,
        })
    }
}

/// Finds the ruler markers in the left-hand band of `image`.
///
/// Both templates are matched; candidates from either that lie within one
/// template height of a stronger candidate are merged. A marker is major when
/// the major template correlates better than the minor one at its location.
/// The marker interval is 5 mm when both size classes occur and 10 mm otherwise.
pub fn detect_ruler(
    image: &GrayImage,
    templates: &RulerTemplates,
    config: &RulerConfig,
) -> Result<RulerDetection> {
    let band_end =
        ((image.width() as f64 * config.band_fraction).ceil() as usize).clamp(1, image.width());
    let min_width = templates
        .major
        .patch
        .width()
        .max(templates.minor.patch.width());
    if band_end < min_width {
        return Err(Error::InvalidInput(format!(
            "search band of {band_end} columns is narrower than the {min_width}-column template"
        )));
    }
    if let Some(i) = config.interval_override_mm {
        if i != 5 && i != 10 {
            return Err(Error::InvalidInput(format!(
                "ruler interval must be 5 or 10 mm, got {i}"
            )));
        }
    }

    let separation = templates
        .major
        .patch
        .height()
        .max(templates.minor.patch.height()) as f64;
    let mut candidates: Vec<_> = [&templates.major, &templates.minor]
        .into_iter()
        .flat_map(|t| match_template(image, t, 0..band_end, config.ncc_threshold))
        .collect();
    candidates.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.y.total_cmp(&b.y)));

    let mut markers: Vec<Marker> = Vec::new();
    for c in candidates {
        if markers.iter().any(|m| (m.y - c.y).abs() < separation) {
            continue;
        }
        let (x, y) = (c.x as usize, c.y.round() as usize);
        let major = ncc_at(image, &templates.major, x, y).unwrap_or(-1.0);
        let minor = ncc_at(image, &templates.minor, x, y).unwrap_or(-1.0);
        let size = if major > minor {
            SizeClass::Major
        } else {
            SizeClass::Minor
        };
        markers.push(Marker {
            x: c.x,
            y: c.y,
            score: c.score,
            size,
        });
    }
    markers.sort_by(|a, b| a.y.total_cmp(&b.y));

    if markers.len() < 3 {
        return Err(Error::RulerNotFound {
            found: markers.len(),
        });
    }

    let mut gaps: Vec<f64> = markers.windows(2).map(|w| w[1].y - w[0].y).collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / gaps.len() as f64;
    let cv = var.sqrt() / mean;
    if cv > config.max_gap_cv {
        return Err(Error::InconsistentSpacing { cv });
    }
    gaps.sort_by(f64::total_cmp);
    let spacing_px = median_sorted(&gaps);

    let interval_mm = config.interval_override_mm.unwrap_or_else(|| {
        let has_major = markers.iter().any(|m| m.size == SizeClass::Major);
        let has_minor = markers.iter().any(|m| m.size == SizeClass::Minor);
        if has_major && has_minor {
            5
        } else {
            10
        }
    });

    Ok(RulerDetection {
        markers,
        spacing_px,
        interval_mm,
    })
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `px/mm = spacing / interval`.
pub fn infer_scale(detection: &RulerDetection) -> ScaleEstimate {
    ScaleEstimate {
        px_per_mm: detection.spacing_px / detection.interval_mm as f64,
        source: ScaleSource::Ruler,
        detection: Some(detection.clone()),
    }
}
