//! Zero-mean normalised cross-correlation.

use std::ops::Range;

use super::{GrayImage, MarkerTemplate};

/// Peak location of the template anchor in image coordinates; `y` is sub-pixel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TemplateMatch {
    pub x: f64,
    pub y: f64,
    pub score: f64,
}

/// Windows whose intensity variance (per pixel) falls below this are treated as flat.
const FLAT_VARIANCE: f64 = 1e-6;

struct PreparedTemplate {
    width: usize,
    height: usize,
    centred: Vec<f64>,
    norm: f64,
}

impl PreparedTemplate {
    fn new(template: &MarkerTemplate) -> Option<Self> {
        let p = &template.patch;
        let n = (p.width() * p.height()) as f64;
        let mean = p.data().iter().map(|&v| v as f64).sum::<f64>() / n;
        let centred: Vec<f64> = p.data().iter().map(|&v| v as f64 - mean).collect();
        let norm = centred.iter().map(|v| v * v).sum::<f64>().sqrt();
        (norm / n.sqrt() > FLAT_VARIANCE.sqrt()).then_some(PreparedTemplate {
            width: p.width(),
            height: p.height(),
            centred,
            norm,
        })
    }

    /// Score with the patch's top-left corner at `(u, v)`; `None` over flat windows.
    fn score(&self, image: &GrayImage, u: usize, v: usize) -> Option<f64> {
        let n = (self.width * self.height) as f64;
        let (mut sum, mut sum_sq, mut cross) = (0.0, 0.0, 0.0);
        for ty in 0..self.height {
            let row = &image.data()[(v + ty) * image.width() + u..][..self.width];
            let trow = &self.centred[ty * self.width..][..self.width];
            for (&iv, &tv) in row.iter().zip(trow) {
                let iv = iv as f64;
                sum += iv;
                sum_sq += iv * iv;
                cross += iv * tv;
            }
        }
        let var_sum = sum_sq - sum * sum / n;
        if var_sum / n <= FLAT_VARIANCE {
            return None;
        }
        Some((cross / (var_sum.sqrt() * self.norm)).clamp(-1.0, 1.0))
    }
}

/// NCC of `template` with its anchor placed at `(x, y)`; `None` when out of range or flat.
pub fn ncc_at(image: &GrayImage, template: &MarkerTemplate, x: usize, y: usize) -> Option<f64> {
    let prepared = PreparedTemplate::new(template)?;
    let u = x.checked_sub(template.anchor.0)?;
    let v = y.checked_sub(template.anchor.1)?;
    if u + prepared.width > image.width() || v + prepared.height > image.height() {
        return None;
    }
    prepared.score(image, u, v)
}

/// Local NCC maxima with `score >= threshold` inside the column band.
///
/// Peaks closer than one template height (and width) to a stronger peak are
/// suppressed. Each surviving peak's row is refined by a parabola through the
/// three vertically adjacent scores. Results are ordered top to bottom.
pub fn match_template(
    image: &GrayImage,
    template: &MarkerTemplate,
    band: Range<usize>,
    threshold: f64,
) -> Vec<TemplateMatch> {
    let Some(prepared) = PreparedTemplate::new(template) else {
        return Vec::new();
    };
    let band = band.start..band.end.min(image.width());
    if band.len() < prepared.width || image.height() < prepared.height {
        return Vec::new();
    }
    let cols = band.len() - prepared.width + 1;
    let rows = image.height() - prepared.height + 1;
    let scores: Vec<Option<f64>> = (0..rows)
        .flat_map(|v| (0..cols).map(move |c| (c, v)))
        .map(|(c, v)| prepared.score(image, band.start + c, v))
        .collect();
    let at = |c: isize, v: isize| -> Option<f64> {
        if c < 0 || v < 0 || c >= cols as isize || v >= rows as isize {
            None
        } else {
            scores[v as usize * cols + c as usize]
        }
    };

    let mut peaks = Vec::new();
    for v in 0..rows as isize {
        for c in 0..cols as isize {
            let Some(s) = at(c, v) else { continue };
            if s < threshold {
                continue;
            }
            let is_max = crate::geometry::MOORE_OFFSETS
                .iter()
                .all(|&(dx, dy)| at(c + dx, v + dy).is_none_or(|n| n <= s));
            if is_max {
                peaks.push((c, v, s));
            }
        }
    }

    // Strongest first; ties resolved top-left first for determinism.
    peaks.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.1, a.0).cmp(&(b.1, b.0))));
    let mut kept: Vec<(isize, isize, f64)> = Vec::new();
    for p in peaks {
        let clash = kept.iter().any(|k| {
            (k.1 - p.1).unsigned_abs() < prepared.height
                && (k.0 - p.0).unsigned_abs() < prepared.width
        });
        if !clash {
            kept.push(p);
        }
    }

    let mut out: Vec<TemplateMatch> = kept
        .into_iter()
        .map(|(c, v, s)| {
            let offset = match (at(c, v - 1), at(c, v + 1)) {
                (Some(up), Some(down)) => parabolic_offset(up, s, down),
                _ => 0.0,
            };
            TemplateMatch {
                x: (band.start as isize + c) as f64 + template.anchor.0 as f64,
                y: v as f64 + offset + template.anchor.1 as f64,
                score: s,
            }
        })
        .collect();
    out.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    out
}

/// Vertex of the parabola through `(-1, up)`, `(0, mid)`, `(1, down)`, clamped to ±0.5.
fn parabolic_offset(up: f64, mid: f64, down: f64) -> f64 {
    let denom = up - 2.0 * mid + down;
    if denom >= 0.0 {
        return 0.0;
    }
    (0.5 * (up - down) / denom).clamp(-0.5, 0.5)
}
