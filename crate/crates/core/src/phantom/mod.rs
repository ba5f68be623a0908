//! Synthetic masks and rulers with exactly known geometry.
//!
//! A phantom is rasterised by pixel-centre sampling of an implicit shape, so
//! every mask pixel is labelled with a single class, as hand annotations are.
//! The matching [`PhantomTruth`] is computed in closed form from the
//! generating parameters and serves as the oracle for the measurement
//! pipeline.

mod morph;

use std::collections::BTreeMap;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use morph::{dilate_region, erode_region};

use crate::biometry::{
    assign_abdomen_axes, assign_head_axes, circumference_from_diameters, FittedShape, Measurement,
    MeasurementName, PlaneClass,
};
use crate::error::{Error, Result};
use crate::geometry::{bbox_diagonal, extract_regions, fit_bbox, EllipseParams, PixelRegion};
use crate::mask::{AnatomyClass, LabelMask};
use crate::scale::{draw_tick, GrayImage, SizeClass};

/// Minimum clearance between a phantom shape and the image border.
pub const SHAPE_MARGIN_PX: f64 = 5.0;
/// Ticks closer than this cannot be separated by the default templates.
pub const MIN_TICK_SPACING_PX: f64 = 8.0;
/// Column where ruler tick bars start.
pub const RULER_X: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PhantomShape {
    Ellipse(EllipseParams),
    /// Segment from `p0` to `p1` swept by a disc of `radius`.
    Capsule {
        p0: (f64, f64),
        p1: (f64, f64),
        radius: f64,
    },
}

impl PhantomShape {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            PhantomShape::Ellipse(e) => e.implicit(x, y) <= 1.0,
            PhantomShape::Capsule { p0, p1, radius } => segment_distance((x, y), p0, p1) <= radius,
        }
    }

    /// Axis-aligned extent `(min_x, min_y, max_x, max_y)` of the continuous shape.
    pub fn extent(&self) -> (f64, f64, f64, f64) {
        match *self {
            PhantomShape::Ellipse(e) => {
                let (hx, hy) = e.half_extents();
                (e.cx - hx, e.cy - hy, e.cx + hx, e.cy + hy)
            }
            PhantomShape::Capsule { p0, p1, radius } => (
                p0.0.min(p1.0) - radius,
                p0.1.min(p1.1) - radius,
                p0.0.max(p1.0) + radius,
                p0.1.max(p1.1) + radius,
            ),
        }
    }
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (vx, vy) = (b.0 - a.0, b.1 - a.1);
    let len_sq = vx * vx + vy * vy;
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * vx + (p.1 - a.1) * vy) / len_sq).clamp(0.0, 1.0)
    };
    (p.0 - a.0 - t * vx).hypot(p.1 - a.1 - t * vy)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulerSpec {
    /// 5 mm rulers alternate major/minor ticks; 10 mm rulers carry majors only.
    pub interval_mm: u32,
    /// Row of the first (major) tick.
    pub origin_y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    pub kind: PlaneClass,
    pub shape: PhantomShape,
    pub width: usize,
    pub height: usize,
    pub px_per_mm: f64,
    pub ruler: RulerSpec,
    /// Random erode/dilate radius applied after rasterisation.
    #[serde(default)]
    pub noise_radius: Option<u32>,
    pub seed: u64,
}

impl PhantomSpec {
    pub fn tick_spacing_px(&self) -> f64 {
        self.px_per_mm * self.ruler.interval_mm as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidInput(
                "phantom image must be non-empty".into(),
            ));
        }
        if !(self.px_per_mm.is_finite() && self.px_per_mm > 0.0) {
            return Err(Error::InvalidInput(format!(
                "px/mm must be positive, got {}",
                self.px_per_mm
            )));
        }
        if self.ruler.interval_mm != 5 && self.ruler.interval_mm != 10 {
            return Err(Error::InvalidInput(format!(
                "ruler interval must be 5 or 10 mm, got {}",
                self.ruler.interval_mm
            )));
        }
        match (self.kind, &self.shape) {
            (PlaneClass::Femur, PhantomShape::Capsule { radius, .. }) => {
                if radius.is_nan() || *radius < 1.0 {
                    return Err(Error::InvalidInput(
                        "capsule radius must be at least 1 px".into(),
                    ));
                }
            }
            (PlaneClass::Head | PlaneClass::Abdomen, PhantomShape::Ellipse(e)) => {
                if !(e.b > 0.0 && e.a >= e.b) {
                    return Err(Error::InvalidInput("ellipse needs a >= b > 0".into()));
                }
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{} phantom needs {} shape",
                    self.kind,
                    if self.kind == PlaneClass::Femur {
                        "a capsule"
                    } else {
                        "an ellipse"
                    }
                )))
            }
        }
        let (x0, y0, x1, y1) = self.shape.extent();
        let max_x = (self.width - 1) as f64 - SHAPE_MARGIN_PX;
        let max_y = (self.height - 1) as f64 - SHAPE_MARGIN_PX;
        if x0 < SHAPE_MARGIN_PX || y0 < SHAPE_MARGIN_PX || x1 > max_x || y1 > max_y {
            return Err(Error::SpecOutOfBounds);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RulerTruth {
    pub tick_rows: Vec<f64>,
    pub sizes: Vec<SizeClass>,
    pub spacing_px: f64,
    pub interval_mm: u32,
}

/// What the pipeline should report for a phantom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomTruth {
    pub plane: PlaneClass,
    pub px_per_mm: f64,
    /// Generating ellipse, or the box over the rasterised femur pixels.
    pub fitted: FittedShape,
    pub measurements: BTreeMap<MeasurementName, Measurement>,
    pub ruler: RulerTruth,
    /// Pixel count of the unperturbed rasterisation.
    pub area: usize,
}

/// Rasterises the shape by pixel-centre sampling and derives the ground truth.
pub fn render_mask(spec: &PhantomSpec) -> Result<(LabelMask, PhantomTruth)> {
    spec.validate()?;
    let class = spec.kind.anatomy();
    let mut mask = LabelMask::new(spec.width, spec.height)?;
    let (x0, y0, x1, y1) = spec.shape.extent();
    let mut pixels = Vec::new();
    for y in y0.floor().max(0.0) as usize..=(y1.ceil() as usize).min(spec.height - 1) {
        for x in x0.floor().max(0.0) as usize..=(x1.ceil() as usize).min(spec.width - 1) {
            if spec.shape.contains(x as f64, y as f64) {
                mask.set(x, y, class);
                pixels.push((x, y));
            }
        }
    }
    if pixels.is_empty() {
        return Err(Error::InvalidInput(
            "phantom shape covers no pixel centre".into(),
        ));
    }
    let area = pixels.len();

    let (fitted, px) = match spec.shape {
        PhantomShape::Ellipse(e) => {
            let mut px = Vec::new();
            if spec.kind == PlaneClass::Head {
                let (bpd, ofd) = assign_head_axes(&e);
                px.push((MeasurementName::BPD, bpd));
                px.push((MeasurementName::OFD, ofd));
                px.push((MeasurementName::HC, circumference_from_diameters(bpd, ofd)));
            } else {
                let (tad, apad) = assign_abdomen_axes(&e);
                px.push((MeasurementName::TAD, tad));
                px.push((MeasurementName::APAD, apad));
                px.push((MeasurementName::AC, circumference_from_diameters(tad, apad)));
            }
            (FittedShape::Ellipse(e), px)
        }
        PhantomShape::Capsule { .. } => {
            let bbox = fit_bbox(&PixelRegion::new(class, pixels));
            (
                FittedShape::BoundingBox(bbox),
                vec![(MeasurementName::FL, bbox_diagonal(&bbox))],
            )
        }
    };
    let measurements = px
        .into_iter()
        .map(|(n, v)| {
            (
                n,
                Measurement {
                    value_px: v,
                    value_mm: v / spec.px_per_mm,
                },
            )
        })
        .collect();

    if let Some(radius) = spec.noise_radius {
        mask = perturb_mask(&mask, radius, spec.seed);
    }

    let ruler = ruler_truth(spec);
    Ok((
        mask,
        PhantomTruth {
            plane: spec.kind,
            px_per_mm: spec.px_per_mm,
            fitted,
            measurements,
            ruler,
            area,
        },
    ))
}

fn ruler_truth(spec: &PhantomSpec) -> RulerTruth {
    let spacing = spec.tick_spacing_px();
    let last_row = spec.height as f64 - 4.0;
    let mut tick_rows = Vec::new();
    let mut sizes = Vec::new();
    if spacing > 0.0 {
        let mut k = 0usize;
        loop {
            let y = spec.ruler.origin_y + k as f64 * spacing;
            if y > last_row {
                break;
            }
            tick_rows.push(y);
            sizes.push(if spec.ruler.interval_mm == 5 && k % 2 == 1 {
                SizeClass::Minor
            } else {
                SizeClass::Major
            });
            k += 1;
        }
    }
    RulerTruth {
        tick_rows,
        sizes,
        spacing_px: spacing,
        interval_mm: spec.ruler.interval_mm,
    }
}

/// Black frame with the ruler ticks drawn near the left edge.
pub fn render_ruler(spec: &PhantomSpec) -> Result<GrayImage> {
    let spacing = spec.tick_spacing_px();
    if spacing.is_nan() || spacing < MIN_TICK_SPACING_PX {
        return Err(Error::UnresolvableTicks {
            spacing_px: spacing,
        });
    }
    if spec.width == 0 || spec.height == 0 {
        return Err(Error::InvalidInput(
            "phantom image must be non-empty".into(),
        ));
    }
    let truth = ruler_truth(spec);
    let mut image = GrayImage::new(spec.width, spec.height)?;
    for (&y, &size) in truth.tick_rows.iter().zip(&truth.sizes) {
        draw_tick(&mut image, RULER_X, y, size);
    }
    Ok(image)
}

/// Ruler frame plus the anatomy painted in mid-gray, kept clear of the ruler band.
pub fn render_frame(spec: &PhantomSpec, mask: &LabelMask, band_fraction: f64) -> Result<GrayImage> {
    let mut image = render_ruler(spec)?;
    let clear = (spec.width as f64 * band_fraction).ceil() as usize + crate::scale::TEMPLATE_WIDTH;
    for y in 0..mask.height().min(image.height()) {
        for x in clear..mask.width().min(image.width()) {
            if mask.get(x, y) != AnatomyClass::Background {
                image.set(x, y, 96);
            }
        }
    }
    Ok(image)
}

/// Erodes or dilates each anatomy region by up to `radius` px.
///
/// The operation and radius are drawn per region from `seed`, in the order
/// regions are returned by [`extract_regions`]. Dilation only claims pixels that
/// were background in the input.
pub fn perturb_mask(mask: &LabelMask, radius: u32, seed: u64) -> LabelMask {
    if radius == 0 {
        return mask.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = mask.clone();
    for region in extract_regions(mask) {
        let r = rng.random_range(0..=radius);
        if rng.random_bool(0.5) {
            morph::dilate_into(&mut out, mask, &region, r);
        } else {
            morph::erode_from(&mut out, mask, &region, r);
        }
    }
    out
}

/// Parameter ranges for randomly drawn phantoms.
#[derive(Clone, Debug, PartialEq)]
pub struct PhantomSampler {
    pub semi_major: Range<f64>,
    pub axis_ratio: Range<f64>,
    pub femur_length: Range<f64>,
    pub femur_radius: Range<f64>,
    pub px_per_mm: Range<f64>,
    pub noise_radius: Option<u32>,
}

impl Default for PhantomSampler {
    fn default() -> Self {
        PhantomSampler {
            semi_major: 100.0..300.0,
            axis_ratio: 0.3..1.0,
            femur_length: 40.0..250.0,
            femur_radius: 3.0..8.0,
            px_per_mm: 2.0..12.0,
            noise_radius: None,
        }
    }
}

impl PhantomSampler {
    /// Draws a valid spec; the canvas is sized to the shape and to hold at least five ticks.
    pub fn sample(&self, kind: PlaneClass, seed: u64) -> PhantomSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let px_per_mm = rng.random_range(self.px_per_mm.clone());
        let interval_mm = if rng.random_bool(0.5) { 5 } else { 10 };
        let pad = SHAPE_MARGIN_PX + 5.0;
        let shape = match kind {
            PlaneClass::Head | PlaneClass::Abdomen => {
                let a = rng.random_range(self.semi_major.clone());
                let b = a * rng.random_range(self.axis_ratio.clone());
                let theta = rng.random_range(0.0..std::f64::consts::PI);
                let unplaced = EllipseParams::new(0.0, 0.0, a, b, theta);
                let (hx, hy) = unplaced.half_extents();
                let cx = pad + hx + rng.random_range(0.0..1.0);
                let cy = pad + hy + rng.random_range(0.0..1.0);
                PhantomShape::Ellipse(EllipseParams { cx, cy, ..unplaced })
            }
            PlaneClass::Femur => {
                let len = rng.random_range(self.femur_length.clone());
                let radius = rng.random_range(self.femur_radius.clone());
                let angle = rng.random_range(0.0..std::f64::consts::PI);
                let (dx, dy) = (0.5 * len * angle.cos(), 0.5 * len * angle.sin());
                let cx = pad + radius + dx.abs() + rng.random_range(0.0..1.0);
                let cy = pad + radius + dy.abs() + rng.random_range(0.0..1.0);
                PhantomShape::Capsule {
                    p0: (cx - dx, cy - dy),
                    p1: (cx + dx, cy + dy),
                    radius,
                }
            }
        };
        let (_, _, x1, y1) = shape.extent();
        let spacing = px_per_mm * interval_mm as f64;
        let origin_y = 10.0 + rng.random_range(0.0..1.0);
        let width = ((x1 + pad).ceil() as usize).max(200);
        let height =
            ((y1 + pad).ceil() as usize).max((origin_y + 5.0 * spacing + 10.0).ceil() as usize);
        PhantomSpec {
            kind,
            shape,
            width,
            height,
            px_per_mm,
            ruler: RulerSpec {
                interval_mm,
                origin_y,
            },
            noise_radius: self.noise_radius,
            seed,
        }
    }
}
