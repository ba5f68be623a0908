//! Direct least-squares ellipse fitting.
//!
//! The conic `A x² + B xy + C y² + D x + E y + F = 0` minimising the algebraic
//! residual subject to `4AC − B² = 1` is found with the partitioned form of the
//! direct method: the design matrix is split into its quadratic block
//! `[x², xy, y²]` and linear block `[x, y, 1]`, the linear coefficients are
//! eliminated in closed form, and what remains is a 3×3 eigenproblem whose
//! single elliptical eigenvector is the solution.
//!
//! Points are centred on their mean and scaled by their mean radius before the
//! solve. The geometric parameters are then mapped back, which keeps far-off
//! image regions as well conditioned as ones near the origin.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Centre, semi-axes (`a >= b > 0`) and major-axis orientation in `[0, π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipseParams {
    pub cx: f64,
    pub cy: f64,
    pub a: f64,
    pub b: f64,
    pub theta: f64,
}

impl EllipseParams {
    /// Builds an ellipse, swapping axes and normalising `theta` so the invariants hold.
    pub fn new(cx: f64, cy: f64, a: f64, b: f64, theta: f64) -> Self {
        let (a, b, theta) = if a >= b {
            (a, b, theta)
        } else {
            (b, a, theta + PI / 2.0)
        };
        EllipseParams {
            cx,
            cy,
            a,
            b,
            theta: normalize_angle(theta),
        }
    }

    /// Point at parameter `t` on the boundary.
    pub fn point_at(&self, t: f64) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        let (st, ct) = t.sin_cos();
        (
            self.cx + self.a * c * ct - self.b * s * st,
            self.cy + self.a * s * ct + self.b * c * st,
        )
    }

    /// `<= 1` inside or on the boundary.
    pub fn implicit(&self, x: f64, y: f64) -> f64 {
        let (s, c) = self.theta.sin_cos();
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        (u / self.a).powi(2) + (v / self.b).powi(2)
    }

    /// Half-widths of the axis-aligned box enclosing the ellipse.
    pub fn half_extents(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (
            ((self.a * c).powi(2) + (self.b * s).powi(2)).sqrt(),
            ((self.a * s).powi(2) + (self.b * c).powi(2)).sqrt(),
        )
    }
}

/// Maps any angle into `[0, π)`.
pub(crate) fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Fits an ellipse to at least six non-collinear points.
pub fn fit_ellipse(points: &[(f64, f64)]) -> Result<EllipseParams> {
    if points.len() < 6 {
        return Err(Error::InsufficientPoints { got: points.len() });
    }
    if points.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return Err(Error::DegenerateConfiguration("non-finite coordinate"));
    }

    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let scale = points
        .iter()
        .map(|p| ((p.0 - mx).powi(2) + (p.1 - my).powi(2)).sqrt())
        .sum::<f64>()
        / n;
    if scale <= f64::EPSILON * (mx.abs() + my.abs()).max(1.0) {
        return Err(Error::DegenerateConfiguration("all points coincide"));
    }

    // Scatter blocks: S1 = D1ᵀD1, S2 = D1ᵀD2, S3 = D2ᵀD2.
    let mut s1 = Matrix3::<f64>::zeros();
    let mut s2 = Matrix3::<f64>::zeros();
    let mut s3 = Matrix3::<f64>::zeros();
    for &(px, py) in points {
        let x = (px - mx) / scale;
        let y = (py - my) / scale;
        let quad = Vector3::new(x * x, x * y, y * y);
        let lin = Vector3::new(x, y, 1.0);
        s1 += quad * quad.transpose();
        s2 += quad * lin.transpose();
        s3 += lin * lin.transpose();
    }

    let s3_inv = s3
        .try_inverse()
        .filter(|m| m.iter().all(|v| v.is_finite()))
        .ok_or(Error::DegenerateConfiguration("collinear points"))?;
    let elim = -s3_inv * s2.transpose();
    let reduced = s1 + s2 * elim;
    // C1⁻¹ for the constraint block [[0,0,2],[0,-1,0],[2,0,0]].
    let c1_inv = Matrix3::new(0.0, 0.0, 0.5, 0.0, -1.0, 0.0, 0.5, 0.0, 0.0);
    let system = c1_inv * reduced;

    // The elliptical solution always has a real eigenvalue; the other two may form a complex pair.
    let eigenvalues = system.complex_eigenvalues();
    let magnitude = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let real = eigenvalues
        .iter()
        .filter(|l| l.im.abs() <= 1e-9 * magnitude.max(f64::MIN_POSITIVE))
        .map(|l| l.re);

    let mut best: Option<(f64, Vector3<f64>)> = None;
    for lambda in real {
        let Some(quad) = null_vector(&(system - Matrix3::identity() * lambda)) else {
            continue;
        };
        let constraint = 4.0 * quad[0] * quad[2] - quad[1] * quad[1];
        if constraint <= 0.0 {
            continue;
        }
        // Algebraic cost normalised by the constraint value.
        let cost = (quad.transpose() * reduced * quad)[0] / constraint;
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, quad));
        }
    }
    let (_, quad) = best.ok_or(Error::DegenerateConfiguration("no elliptical solution"))?;
    let lin = elim * quad;

    let unit = conic_to_params([quad[0], quad[1], quad[2], lin[0], lin[1], lin[2]])?;
    Ok(EllipseParams {
        cx: mx + scale * unit.cx,
        cy: my + scale * unit.cy,
        a: scale * unit.a,
        b: scale * unit.b,
        theta: unit.theta,
    })
}

/// Null vector of a rank-2 3×3 matrix from the best-conditioned row cross product.
fn null_vector(m: &Matrix3<f64>) -> Option<Vector3<f64>> {
    let rows = [
        m.row(0).transpose(),
        m.row(1).transpose(),
        m.row(2).transpose(),
    ];
    let candidates = [
        rows[0].cross(&rows[1]),
        rows[0].cross(&rows[2]),
        rows[1].cross(&rows[2]),
    ];
    let v = candidates
        .into_iter()
        .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))?;
    let norm = v.norm();
    if norm == 0.0 || !norm.is_finite() {
        return None;
    }
    Some(v / norm)
}

/// Geometric parameters of the conic `A x² + B xy + C y² + D x + E y + F = 0`.
fn conic_to_params(coeffs: [f64; 6]) -> Result<EllipseParams> {
    let [mut a, mut b, mut c, mut d, mut e, mut f] = coeffs;
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        return Err(Error::DegenerateConfiguration("conic is not an ellipse"));
    }
    if a + c < 0.0 {
        (a, b, c, d, e, f) = (-a, -b, -c, -d, -e, -f);
    }

    // Centre solves the gradient equations [2A B; B 2C] p = -[D; E].
    let cx = (b * e - 2.0 * c * d) / (-disc);
    let cy = (b * d - 2.0 * a * e) / (-disc);
    let f0 = f + 0.5 * (d * cx + e * cy);
    if f0 >= 0.0 {
        return Err(Error::DegenerateConfiguration("imaginary ellipse"));
    }

    let mean = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + 0.25 * b * b).sqrt();
    let (l_small, l_large) = (mean - radius, mean + radius);
    if l_small <= 0.0 {
        return Err(Error::DegenerateConfiguration("conic is not an ellipse"));
    }
    let major = (-f0 / l_small).sqrt();
    let minor = (-f0 / l_large).sqrt();
    let theta = normalize_angle(0.5 * (-b).atan2(c - a));

    Ok(EllipseParams {
        cx,
        cy,
        a: major,
        b: minor,
        theta,
    })
}
