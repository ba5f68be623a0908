//! SVG overlay of a fitted shape, its measurement axes and labels on the frame.

use std::fmt::Write;
use std::io::Cursor;

use base64::Engine;
use image::{ImageBuffer, Luma};

use crate::biometry::{BiometryReport, FittedShape, MeasurementName, PlaneClass};
use crate::geometry::EllipseParams;
use crate::scale::GrayImage;

const STROKE: &str = "#00e5ff";
const LABEL: &str = "#ffeb3b";

fn png_data_uri(image: &GrayImage) -> String {
    let buf: ImageBuffer<Luma<u8>, Vec<u8>> = ImageBuffer::from_raw(
        image.width() as u32,
        image.height() as u32,
        image.data().to_vec(),
    )
    .expect("image buffer matches dimensions");
    let mut bytes = Cursor::new(Vec::new());
    buf.write_to(&mut bytes, image::ImageFormat::Png)
        .expect("in-memory PNG encoding");
    format!(
        "data:image/png;base64,{}",
        base64::engine::general_purpose::STANDARD.encode(bytes.into_inner())
    )
}

fn label(out: &mut String, x: f64, y: f64, report: &BiometryReport, name: MeasurementName) {
    if let Some(m) = report.get(name) {
        let _ = writeln!(
            out,
            r#"    <text x="{x:.2}" y="{y:.2}">{name} {:.2} mm</text>"#,
            m.value_mm
        );
    }
}

fn axis_line(out: &mut String, e: &EllipseParams, half: f64, angle: f64) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    let (x0, y0) = (e.cx - half * c, e.cy - half * s);
    let (x1, y1) = (e.cx + half * c, e.cy + half * s);
    let _ = writeln!(
        out,
        r#"    <line x1="{x0:.6}" y1="{y0:.6}" x2="{x1:.6}" y2="{y1:.6}"/>"#
    );
    (x1, y1)
}

/// Renders `report` over `image` as an SVG document in image pixel coordinates.
///
/// Head and abdomen reports draw one ellipse, both full axes and three labels;
/// femur reports draw the box, its diagonal and one label.
pub fn render_overlay(image: &GrayImage, report: &BiometryReport) -> String {
    let (w, h) = (image.width(), image.height());
    let mut shapes = String::new();
    let mut labels = String::new();

    match report.fitted {
        FittedShape::Ellipse(e) => {
            let _ = writeln!(
                shapes,
                r#"    <ellipse cx="{:.6}" cy="{:.6}" rx="{:.6}" ry="{:.6}" transform="rotate({:.6} {:.6} {:.6})"/>"#,
                e.cx,
                e.cy,
                e.a,
                e.b,
                e.theta.to_degrees(),
                e.cx,
                e.cy
            );
            let major_end = axis_line(&mut shapes, &e, e.a, e.theta);
            let minor_end = axis_line(&mut shapes, &e, e.b, e.theta + std::f64::consts::FRAC_PI_2);
            let (major_name, minor_name, circ) = match report.plane {
                PlaneClass::Head => (
                    MeasurementName::OFD,
                    MeasurementName::BPD,
                    MeasurementName::HC,
                ),
                _ => {
                    let tad_is_major = report
                        .get(MeasurementName::TAD)
                        .zip(report.get(MeasurementName::APAD))
                        .is_some_and(|(t, a)| t.value_px >= a.value_px);
                    if tad_is_major {
                        (
                            MeasurementName::TAD,
                            MeasurementName::APAD,
                            MeasurementName::AC,
                        )
                    } else {
                        (
                            MeasurementName::APAD,
                            MeasurementName::TAD,
                            MeasurementName::AC,
                        )
                    }
                }
            };
            label(
                &mut labels,
                major_end.0 + 4.0,
                major_end.1,
                report,
                major_name,
            );
            label(
                &mut labels,
                minor_end.0 + 4.0,
                minor_end.1,
                report,
                minor_name,
            );
            let (_, hy) = e.half_extents();
            label(
                &mut labels,
                e.cx - e.a * 0.5,
                (e.cy - hy - 8.0).max(14.0),
                report,
                circ,
            );
        }
        FittedShape::BoundingBox(b) => {
            let _ = writeln!(
                shapes,
                r#"    <rect x="{}" y="{}" width="{}" height="{}"/>"#,
                b.min_x,
                b.min_y,
                b.width(),
                b.height()
            );
            let _ = writeln!(
                shapes,
                r#"    <line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                b.min_x, b.min_y, b.max_x, b.max_y
            );
            label(
                &mut labels,
                b.max_x as f64 + 4.0,
                b.max_y as f64,
                report,
                MeasurementName::FL,
            );
        }
    }

    format!(
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            "\n",
            r#"  <image x="0" y="0" width="{w}" height="{h}" href="{href}"/>"#,
            "\n",
            r#"  <g fill="none" stroke="{stroke}" stroke-width="1.5">"#,
            "\n{shapes}  </g>\n",
            r#"  <g fill="{label}" font-family="sans-serif" font-size="14">"#,
            "\n{labels}  </g>\n</svg>\n"
        ),
        w = w,
        h = h,
        href = png_data_uri(image),
        stroke = STROKE,
        label = LABEL,
        shapes = shapes,
        labels = labels,
    )
}
