//! Pixel-per-millimetre recovery from the on-screen ruler.

mod image;
mod ncc;
mod ruler;
mod templates;

pub use self::image::GrayImage;
pub use ncc::{match_template, ncc_at, TemplateMatch};
pub use ruler::{
    detect_ruler, infer_scale, Marker, RulerConfig, RulerDetection, ScaleEstimate, ScaleSource,
};
pub use templates::{
    draw_tick, MarkerTemplate, RulerTemplates, SizeClass, TEMPLATE_ANCHOR, TEMPLATE_HEIGHT,
    TEMPLATE_WIDTH, TICK_SIGMA,
};
