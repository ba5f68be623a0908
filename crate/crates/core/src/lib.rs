//! Fetal biometry from multi-class ultrasound label masks.
//!
//! A mask labels every pixel as background, head, abdomen or femur. From it the
//! crate identifies the imaged plane, fits an ellipse (head, abdomen) or an
//! axis-aligned box (femur), and reports BPD, OFD, HC, TAD, APAD, AC or FL in
//! millimetres, using a scale read from the on-screen ruler or supplied
//! directly. It also ships the tooling used to judge such a pipeline:
//! IoU metrics, weighted cross-entropy class weights, boxplot error
//! statistics with the ±15 % clinical tolerance, subject-disjoint folds, and a
//! phantom generator with closed-form ground truth.
//!
//! ```
//! use fetal_biometry::biometry::{measure, MeasureConfig, MeasurementName};
//! use fetal_biometry::phantom::{render_mask, PhantomSampler};
//! use fetal_biometry::biometry::PlaneClass;
//! use fetal_biometry::scale::ScaleEstimate;
//!
//! let spec = PhantomSampler::default().sample(PlaneClass::Head, 7);
//! let (mask, truth) = render_mask(&spec).unwrap();
//! let scale = ScaleEstimate::fixed(spec.px_per_mm).unwrap();
//! let report = measure(&mask, &scale, &MeasureConfig::default()).unwrap();
//!
//! let hc = report.get(MeasurementName::HC).unwrap().value_mm;
//! let expected = truth.measurements[&MeasurementName::HC].value_mm;
//! assert!((hc - expected).abs() / expected < 0.02);
//! ```

pub mod batch;
pub mod biometry;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod io;
pub mod mask;
pub mod phantom;
pub mod scale;

pub use error::{Error, Result};
pub use mask::{AnatomyClass, LabelMask};
