//! CSV inputs: subject manifests, clinical measurements, error pairs, class counts.

use std::path::Path;

use serde::Deserialize;

use crate::biometry::MeasurementName;
use crate::error::{Error, Result};
use crate::evaluation::ClassPixelCounts;
use crate::mask::AnatomyClass;

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::UnreadableFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })
}

fn measurement(name: &str) -> Result<MeasurementName> {
    MeasurementName::parse(name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown measurement {name:?}")))
}

#[derive(Deserialize)]
struct ManifestRow {
    subject_id: String,
    image_count: usize,
}

/// `subject_id,image_count`
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<(String, usize)>> {
    reader(path.as_ref())?
        .deserialize::<ManifestRow>()
        .map(|r| Ok(r.map(|r| (r.subject_id, r.image_count))?))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClinicalRecord {
    pub image_id: String,
    pub measurement: MeasurementName,
    pub value_mm: f64,
}

#[derive(Deserialize)]
struct ClinicalRow {
    image_id: String,
    measurement: String,
    value_mm: f64,
}

/// `image_id,measurement,value_mm`
pub fn read_clinical(path: impl AsRef<Path>) -> Result<Vec<ClinicalRecord>> {
    reader(path.as_ref())?
        .deserialize::<ClinicalRow>()
        .map(|r| {
            let r = r?;
            Ok(ClinicalRecord {
                image_id: r.image_id,
                measurement: measurement(&r.measurement)?,
                value_mm: r.value_mm,
            })
        })
        .collect()
}

#[derive(Deserialize)]
struct ErrorRow {
    measurement: String,
    predicted_mm: f64,
    clinical_mm: f64,
}

/// `measurement,predicted_mm,clinical_mm`
pub fn read_error_pairs(path: impl AsRef<Path>) -> Result<Vec<(MeasurementName, f64, f64)>> {
    reader(path.as_ref())?
        .deserialize::<ErrorRow>()
        .map(|r| {
            let r = r?;
            Ok((measurement(&r.measurement)?, r.predicted_mm, r.clinical_mm))
        })
        .collect()
}

#[derive(Deserialize)]
struct CountRow {
    class: String,
    pixels: f64,
}

/// `class,pixels` with class names `background`, `head`, `abdomen`, `femur`.
pub fn read_class_counts(path: impl AsRef<Path>) -> Result<ClassPixelCounts> {
    let mut counts = std::collections::BTreeMap::new();
    for row in reader(path.as_ref())?.deserialize::<CountRow>() {
        let row = row?;
        let class = AnatomyClass::from_name(&row.class)
            .ok_or_else(|| Error::InvalidInput(format!("unknown class {:?}", row.class)))?;
        if counts.insert(class, row.pixels).is_some() {
            return Err(Error::InvalidInput(format!("class {class} listed twice")));
        }
    }
    Ok(ClassPixelCounts(counts))
}
