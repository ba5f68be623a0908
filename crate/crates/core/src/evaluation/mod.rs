//! Segmentation metrics, class weights, error statistics and fold assignment.

mod folds;
mod iou;
mod stats;
mod weights;

pub use folds::{assign_folds, FoldAssignment};
pub use iou::{aggregate_miou, iou, per_image_miou, ConfusionMatrix, PerImageMiou, SegMetrics};
pub use stats::{error_stats, ErrorStats, CLINICAL_TOLERANCE};
pub use weights::{class_weights, ClassPixelCounts, ClassWeights};
