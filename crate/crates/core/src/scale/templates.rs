//! Ruler tick glyphs and the matching templates derived from them.
//!
//! A tick is a horizontal bar whose vertical profile is a Gaussian of width
//! [`TICK_SIGMA`]. The smooth profile lets the correlation peak be refined to
//! sub-pixel precision, and rendering a tick at an integer row reproduces the
//! default template patch byte for byte.

use serde::{Deserialize, Serialize};

use super::GrayImage;
use crate::error::{Error, Result};

pub const TEMPLATE_WIDTH: usize = 16;
pub const TEMPLATE_HEIGHT: usize = 7;
/// Marker centre inside the patch: left end of the bar, middle row.
pub const TEMPLATE_ANCHOR: (usize, usize) = (2, 3);
pub const TICK_SIGMA: f64 = 0.85;

const MAJOR_LENGTH: usize = 12;
const MINOR_LENGTH: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Major,
    Minor,
}

impl SizeClass {
    pub fn bar_length(self) -> usize {
        match self {
            SizeClass::Major => MAJOR_LENGTH,
            SizeClass::Minor => MINOR_LENGTH,
        }
    }
}

/// A marker patch and the offset of the marker centre within it.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkerTemplate {
    pub patch: GrayImage,
    pub anchor: (usize, usize),
    pub size: SizeClass,
}

impl MarkerTemplate {
    pub fn new(patch: GrayImage, anchor: (usize, usize), size: SizeClass) -> Result<Self> {
        if anchor.0 >= patch.width() || anchor.1 >= patch.height() {
            return Err(Error::InvalidInput(format!(
                "anchor {anchor:?} outside {}x{} patch",
                patch.width(),
                patch.height()
            )));
        }
        Ok(MarkerTemplate {
            patch,
            anchor,
            size,
        })
    }

    /// The built-in template for a size class, identical to a tick drawn at an integer row.
    pub fn default_for(size: SizeClass) -> Self {
        let mut patch = GrayImage::new(TEMPLATE_WIDTH, TEMPLATE_HEIGHT).expect("non-empty patch");
        draw_tick(
            &mut patch,
            TEMPLATE_ANCHOR.0,
            TEMPLATE_ANCHOR.1 as f64,
            size,
        );
        MarkerTemplate {
            patch,
            anchor: TEMPLATE_ANCHOR,
            size,
        }
    }
}

/// The major/minor template pair used for ruler detection.
#[derive(Clone, Debug, PartialEq)]
pub struct RulerTemplates {
    pub major: MarkerTemplate,
    pub minor: MarkerTemplate,
}

impl Default for RulerTemplates {
    fn default() -> Self {
        RulerTemplates {
            major: MarkerTemplate::default_for(SizeClass::Major),
            minor: MarkerTemplate::default_for(SizeClass::Minor),
        }
    }
}

/// Draws a tick whose bar starts at column `x` and is centred on (sub-pixel) row `y`.
///
/// Only rows within three pixels of the centre are touched; intensities combine by max.
pub fn draw_tick(image: &mut GrayImage, x: usize, y: f64, size: SizeClass) {
    let first = (y - 3.0).ceil().max(0.0) as usize;
    let last = ((y + 3.0).floor() as isize).min(image.height() as isize - 1);
    if last < 0 {
        return;
    }
    for row in first..=last as usize {
        let d = row as f64 - y;
        let value = (255.0 * (-d * d / (2.0 * TICK_SIGMA * TICK_SIGMA)).exp()).round() as u8;
        for col in x..(x + size.bar_length()).min(image.width()) {
            let v = image.get(col, row).max(value);
            image.set(col, row, v);
        }
    }
}
