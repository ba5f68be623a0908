//! Per-image measurement: plane identification, shape fitting, unit conversion.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    bbox_diagonal, extract_regions, fit_bbox, fit_ellipse, trace_contour, BoundingBox,
    EllipseParams, PixelRegion,
};
use crate::mask::{AnatomyClass, LabelMask};
use crate::scale::ScaleEstimate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlaneClass {
    /// Transventricular plane.
    Head,
    /// Transabdominal plane.
    Abdomen,
    Femur,
}

impl PlaneClass {
    pub fn anatomy(self) -> AnatomyClass {
        match self {
            PlaneClass::Head => AnatomyClass::Head,
            PlaneClass::Abdomen => AnatomyClass::Abdomen,
            PlaneClass::Femur => AnatomyClass::Femur,
        }
    }

    pub fn from_anatomy(class: AnatomyClass) -> Option<Self> {
        match class {
            AnatomyClass::Head => Some(PlaneClass::Head),
            AnatomyClass::Abdomen => Some(PlaneClass::Abdomen),
            AnatomyClass::Femur => Some(PlaneClass::Femur),
            AnatomyClass::Background => None,
        }
    }

    /// Measurements reported for this plane.
    pub fn measurements(self) -> &'static [MeasurementName] {
        use MeasurementName::*;
        match self {
            PlaneClass::Head => &[BPD, OFD, HC],
            PlaneClass::Abdomen => &[TAD, APAD, AC],
            PlaneClass::Femur => &[FL],
        }
    }
}

impl fmt::Display for PlaneClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.anatomy().name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MeasurementName {
    BPD,
    OFD,
    HC,
    TAD,
    APAD,
    AC,
    FL,
}

impl MeasurementName {
    pub const ALL: [MeasurementName; 7] = [
        MeasurementName::BPD,
        MeasurementName::OFD,
        MeasurementName::HC,
        MeasurementName::TAD,
        MeasurementName::APAD,
        MeasurementName::AC,
        MeasurementName::FL,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementName::BPD => "BPD",
            MeasurementName::OFD => "OFD",
            MeasurementName::HC => "HC",
            MeasurementName::TAD => "TAD",
            MeasurementName::APAD => "APAD",
            MeasurementName::AC => "AC",
            MeasurementName::FL => "FL",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for MeasurementName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub value_px: f64,
    pub value_mm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedShape {
    Ellipse(EllipseParams),
    BoundingBox(BoundingBox),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QualityFlag {
    /// Measured region is smaller than the configured minimum area.
    TinyRegion,
    /// Femur box collapsed to a single pixel; FL is zero.
    DegenerateFemur,
    /// Fitted ellipse has `b / a` below the eccentricity limit.
    EccentricFit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureConfig {
    pub min_region_area: usize,
    pub min_axis_ratio: f64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig {
            min_region_area: 100,
            min_axis_ratio: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiometryReport {
    pub plane: PlaneClass,
    pub scale: ScaleEstimate,
    pub fitted: FittedShape,
    pub region_area: usize,
    pub measurements: BTreeMap<MeasurementName, Measurement>,
    pub flags: Vec<QualityFlag>,
}

impl BiometryReport {
    pub fn get(&self, name: MeasurementName) -> Option<Measurement> {
        self.measurements.get(&name).copied()
    }
}

/// Plane = anatomy class with the most pixels; region = that class's largest component.
pub fn detect_plane(mask: &LabelMask) -> Result<(PlaneClass, PixelRegion)> {
    let counts = mask.class_counts();
    let class = AnatomyClass::ANATOMY
        .into_iter()
        .filter(|c| counts[c.index()] > 0)
        // earlier class wins ties
        .max_by(|a, b| counts[a.index()].cmp(&counts[b.index()]).then(b.cmp(a)))
        .ok_or(Error::NoAnatomy)?;
    let region = extract_regions(mask)
        .into_iter()
        .find(|r| r.class == class)
        .ok_or(Error::NoAnatomy)?;
    let plane = PlaneClass::from_anatomy(class).ok_or(Error::NoAnatomy)?;
    Ok((plane, region))
}

/// Clinical circumference from two diameters: `π (d1 + d2) / 2`.
pub fn circumference_from_diameters(d1: f64, d2: f64) -> f64 {
    PI * (d1 + d2) / 2.0
}

/// Head diameters in pixels: `(BPD, OFD)` = (minor, major) full axes.
pub fn assign_head_axes(e: &EllipseParams) -> (f64, f64) {
    (2.0 * e.b, 2.0 * e.a)
}

/// Abdominal diameters in pixels: `(TAD, APAD)`.
///
/// The full axis within 45° of image-horizontal is transverse; at exactly 45°
/// the major axis is taken as transverse.
pub fn assign_abdomen_axes(e: &EllipseParams) -> (f64, f64) {
    let theta = crate::geometry::normalize_angle(e.theta);
    let from_horizontal = theta.min(PI - theta);
    if from_horizontal <= PI / 4.0 {
        (2.0 * e.a, 2.0 * e.b)
    } else {
        (2.0 * e.b, 2.0 * e.a)
    }
}

/// Pixel-centre contours sit on average half a pixel inside the mask footprint.
pub const CONTOUR_INSET_PX: f64 = 0.5;

/// Runs the full measurement for one mask.
pub fn measure(
    mask: &LabelMask,
    scale: &ScaleEstimate,
    config: &MeasureConfig,
) -> Result<BiometryReport> {
    if !(scale.px_per_mm.is_finite() && scale.px_per_mm > 0.0) {
        return Err(Error::InvalidInput(format!(
            "px/mm must be positive, got {}",
            scale.px_per_mm
        )));
    }
    let (plane, region) = detect_plane(mask)?;
    let mut flags = Vec::new();
    if region.area() < config.min_region_area {
        flags.push(QualityFlag::TinyRegion);
    }

    let mut px: Vec<(MeasurementName, f64)> = Vec::with_capacity(3);
    let fitted = match plane {
        PlaneClass::Head | PlaneClass::Abdomen => {
            let contour = trace_contour(&region);
            let fit = fit_ellipse(&contour.to_f64())?;
            let e = EllipseParams {
                a: fit.a + CONTOUR_INSET_PX,
                b: fit.b + CONTOUR_INSET_PX,
                ..fit
            };
            if e.b / e.a < config.min_axis_ratio {
                flags.push(QualityFlag::EccentricFit);
            }
            if plane == PlaneClass::Head {
                let (bpd, ofd) = assign_head_axes(&e);
                px.push((MeasurementName::BPD, bpd));
                px.push((MeasurementName::OFD, ofd));
                px.push((MeasurementName::HC, circumference_from_diameters(bpd, ofd)));
            } else {
                let (tad, apad) = assign_abdomen_axes(&e);
                px.push((MeasurementName::TAD, tad));
                px.push((MeasurementName::APAD, apad));
                px.push((MeasurementName::AC, circumference_from_diameters(tad, apad)));
            }
            FittedShape::Ellipse(e)
        }
        PlaneClass::Femur => {
            let bbox = fit_bbox(&region);
            let fl = bbox_diagonal(&bbox);
            if fl == 0.0 {
                flags.push(QualityFlag::DegenerateFemur);
            }
            px.push((MeasurementName::FL, fl));
            FittedShape::BoundingBox(bbox)
        }
    };

    let measurements = px
        .into_iter()
        .map(|(name, value_px)| {
            (
                name,
                Measurement {
                    value_px,
                    value_mm: value_px / scale.px_per_mm,
                },
            )
        })
        .collect();
    Ok(BiometryReport {
        plane,
        scale: scale.clone(),
        fitted,
        region_area: region.area(),
        measurements,
        flags,
    })
}
