use std::collections::VecDeque;

use crate::geometry::MOORE_OFFSETS;
use crate::mask::{AnatomyClass, LabelMask};

/// One 8-connected component of a single anatomy class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PixelRegion {
    pub class: AnatomyClass,
    /// Pixel coordinates `(x, y)` in raster order.
    pub pixels: Vec<(usize, usize)>,
}

impl PixelRegion {
    pub fn new(class: AnatomyClass, mut pixels: Vec<(usize, usize)>) -> Self {
        pixels.sort_by_key(|&(x, y)| (y, x));
        pixels.dedup();
        PixelRegion { class, pixels }
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }
}

/// Splits every non-background class into 8-connected components, largest first.
///
/// Ties in area keep raster order of each component's first pixel.
pub fn extract_regions(mask: &LabelMask) -> Vec<PixelRegion> {
    let (w, h) = (mask.width(), mask.height());
    let labels = mask.labels();
    let mut seen = vec![false; w * h];
    let mut regions = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..w * h {
        let class = labels[start];
        if class == AnatomyClass::Background || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            pixels.push((x, y));
            for (dx, dy) in MOORE_OFFSETS {
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if !seen[j] && labels[j] == class {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        regions.push(PixelRegion::new(class, pixels));
    }

    regions.sort_by_key(|r| std::cmp::Reverse(r.area()));
    regions
}
