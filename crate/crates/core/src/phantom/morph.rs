//! Binary morphology on single anatomy regions with Euclidean disc elements.

use crate::geometry::PixelRegion;
use crate::mask::{AnatomyClass, LabelMask};

fn disc_offsets(radius: u32) -> Vec<(isize, isize)> {
    let r = radius as isize;
    (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter(|&(dx, dy)| dx * dx + dy * dy <= r * r)
        .collect()
}

fn neighbour(mask: &LabelMask, x: usize, y: usize, d: (isize, isize)) -> Option<(usize, usize)> {
    let nx = x as isize + d.0;
    let ny = y as isize + d.1;
    (nx >= 0 && ny >= 0 && (nx as usize) < mask.width() && (ny as usize) < mask.height())
        .then_some((nx as usize, ny as usize))
}

/// Grows `region` by `radius` px into background pixels of `mask`.
pub fn dilate_region(mask: &mut LabelMask, region: &PixelRegion, radius: u32) {
    dilate_into(mask, &mask.clone(), region, radius);
}

/// Shrinks `region` by `radius` px; removed pixels become background.
pub fn erode_region(mask: &mut LabelMask, region: &PixelRegion, radius: u32) {
    erode_from(mask, &mask.clone(), region, radius);
}

pub(crate) fn dilate_into(out: &mut LabelMask, src: &LabelMask, region: &PixelRegion, radius: u32) {
    let offsets = disc_offsets(radius);
    for &(x, y) in &region.pixels {
        for &d in &offsets {
            if let Some((nx, ny)) = neighbour(src, x, y, d) {
                if src.get(nx, ny) == AnatomyClass::Background
                    && out.get(nx, ny) == AnatomyClass::Background
                {
                    out.set(nx, ny, region.class);
                }
            }
        }
    }
}

pub(crate) fn erode_from(out: &mut LabelMask, src: &LabelMask, region: &PixelRegion, radius: u32) {
    let offsets = disc_offsets(radius);
    for &(x, y) in &region.pixels {
        let keeps = offsets.iter().all(|&d| {
            neighbour(src, x, y, d).is_some_and(|(nx, ny)| src.get(nx, ny) == region.class)
        });
        if !keeps {
            out.set(x, y, AnatomyClass::Background);
        }
    }
}
