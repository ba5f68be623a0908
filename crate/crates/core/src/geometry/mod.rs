//! Region extraction and the two shape-fitting primitives.

mod bbox;
mod contour;
mod ellipse;
mod regions;

pub use bbox::{bbox_diagonal, fit_bbox, BoundingBox};
pub use contour::{trace_contour, Contour};
pub(crate) use ellipse::normalize_angle;
pub use ellipse::{fit_ellipse, EllipseParams};
pub use regions::{extract_regions, PixelRegion};

/// Clockwise 8-neighbourhood (y grows downwards), starting west.
pub(crate) const MOORE_OFFSETS: [(isize, isize); 8] = [
    (-1, 0),
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
];
