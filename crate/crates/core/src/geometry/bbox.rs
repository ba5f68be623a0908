use serde::{Deserialize, Serialize};

use crate::geometry::PixelRegion;

/// Axis-aligned box over pixel-centre coordinates (orientation is always zero).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_x: usize,
    pub min_y: usize,
    pub max_x: usize,
    pub max_y: usize,
}

impl BoundingBox {
    pub fn width(&self) -> usize {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> usize {
        self.max_y - self.min_y
    }
}

/// Tight box around the region's pixel centres.
pub fn fit_bbox(region: &PixelRegion) -> BoundingBox {
    let mut it = region.pixels.iter();
    let &(x, y) = it.next().expect("region has at least one pixel");
    it.fold(
        BoundingBox {
            min_x: x,
            min_y: y,
            max_x: x,
            max_y: y,
        },
        |b, &(x, y)| BoundingBox {
            min_x: b.min_x.min(x),
            min_y: b.min_y.min(y),
            max_x: b.max_x.max(x),
            max_y: b.max_y.max(y),
        },
    )
}

/// Centre-to-centre diagonal length in pixels.
pub fn bbox_diagonal(bbox: &BoundingBox) -> f64 {
    (bbox.width() as f64).hypot(bbox.height() as f64)
}
