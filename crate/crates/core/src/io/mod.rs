//! File formats: label-mask and frame PNGs, template assets, CSV inputs,
//! report JSON and SVG overlays.

mod csv_inputs;
mod overlay;
mod png;
mod report;
mod templates;

pub use csv_inputs::{
    read_class_counts, read_clinical, read_error_pairs, read_manifest, ClinicalRecord,
};
pub use overlay::render_overlay;
pub use png::{load_gray, load_mask, save_gray, save_mask};
pub use report::{
    read_report, round_significant, to_canonical_json, write_json, BatchSummary, ReportDocument,
    ReportEntry, SIGNIFICANT_DIGITS,
};
pub use templates::{load_templates, save_templates, TemplateSidecar, TEMPLATE_DIR_ENV};
