//! Reference computations that do not go through the library's boundary
//! formulas: area integrals by 2D quadrature over `E`, dense polylines for
//! extents and surface sets.
#![allow(dead_code)]

use std::f64::consts::PI;

use bubblering::geometry::{CrossSection, ShapeKind};
use gauss_quad::GaussLegendre;

/// `(|E|, ∫_E r dA, ∫_E r⁻² dA)`.
#[derive(Debug, Clone, Copy)]
pub struct AreaIntegrals {
    pub area: f64,
    pub moment: f64,
    pub inverse_square: f64,
}

impl AreaIntegrals {
    pub fn major_radius(&self) -> f64 {
        self.moment / self.area
    }

    pub fn delta(&self) -> f64 {
        self.inverse_square - 2.0 * PI
    }
}

/// `∫₀¹ s / (c + s d)² ds`, the radial integral of `r⁻²` along a ray.
fn ray_inverse_square(c: f64, d: f64) -> f64 {
    let x = d / c;
    // ln(1 + x) − x/(1 + x) = Σ_{k≥2} (−1)^k (k − 1)/k x^k
    let phi_over_x2 = if x.abs() < 1e-3 {
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 2..12 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (k - 1) as f64 / k as f64 * pow;
            pow *= x;
        }
        sum
    } else {
        (x.ln_1p() - x / (1.0 + x)) / (x * x)
    };
    phi_over_x2 / (c * c)
}

/// Contribution of the thin triangle `(centre, X, X + dX)` per unit of the
/// boundary parameter, with `J = (X − centre) × X'`.
fn ray_contribution(centre: [f64; 2], x: [f64; 2], jac: f64) -> [f64; 3] {
    let c = centre[0];
    let d = x[0] - centre[0];
    [0.5 * jac, jac * (c / 2.0 + d / 3.0), jac * ray_inverse_square(c, d)]
}

fn smooth_integrals(shape: &CrossSection, centre: [f64; 2], samples: usize) -> [f64; 3] {
    let mut acc = [0.0; 3];
    let h = 2.0 * PI / samples as f64;
    for j in 0..samples {
        let p = shape.point(h * j as f64);
        let x = [p.r, p.z];
        let jac = (x[0] - centre[0]) * p.dz - (x[1] - centre[1]) * p.dr;
        let c = ray_contribution(centre, x, jac);
        for k in 0..3 {
            acc[k] += h * c[k];
        }
    }
    acc
}

/// Area integrals by a polar decomposition of `E` about an interior point:
/// exact radial integrals, trapezoidal rule in the angle for smooth kinds and
/// Gauss–Legendre along each edge for polygons. Smooth kinds are refined until
/// two successive levels agree to `1e-13` relative.
pub fn area_integrals(shape: &CrossSection) -> AreaIntegrals {
    let acc = match shape.kind() {
        ShapeKind::Polygon { vertices } => {
            let n = vertices.len() as f64;
            let centre = [
                vertices.iter().map(|v| v[0]).sum::<f64>() / n,
                vertices.iter().map(|v| v[1]).sum::<f64>() / n,
            ];
            let rule = GaussLegendre::new(48).unwrap();
            let mut acc = [0.0; 3];
            for i in 0..vertices.len() {
                let a = vertices[i];
                let b = vertices[(i + 1) % vertices.len()];
                let e = [b[0] - a[0], b[1] - a[1]];
                for (k, slot) in acc.iter_mut().enumerate() {
                    *slot += rule.integrate(0.0, 1.0, |u| {
                        let x = [a[0] + u * e[0], a[1] + u * e[1]];
                        let jac = (x[0] - centre[0]) * e[1] - (x[1] - centre[1]) * e[0];
                        ray_contribution(centre, x, jac)[k]
                    });
                }
            }
            acc
        }
        kind => {
            let centre = match kind {
                ShapeKind::Ellipse { r0, .. } | ShapeKind::Disk { r0, .. } | ShapeKind::FourierStar { r0, .. } => [*r0, 0.0],
                ShapeKind::Polygon { .. } => unreachable!(),
            };
            let mut samples = 256;
            let mut prev = smooth_integrals(shape, centre, samples);
            loop {
                samples *= 2;
                let next = smooth_integrals(shape, centre, samples);
                let settled = (0..3).all(|k| (next[k] - prev[k]).abs() <= 1e-13 * next[k].abs());
                prev = next;
                if settled || samples >= 1 << 18 {
                    break;
                }
            }
            prev
        }
    };
    AreaIntegrals {
        area: acc[0],
        moment: acc[1],
        inverse_square: acc[2],
    }
}

/// Dense closed polyline through the boundary.
pub fn polyline(shape: &CrossSection, samples: usize) -> Vec<[f64; 2]> {
    match shape.kind() {
        ShapeKind::Polygon { vertices } => {
            let per_edge = (samples / vertices.len()).max(1);
            let mut pts = Vec::new();
            for i in 0..vertices.len() {
                let a = vertices[i];
                let b = vertices[(i + 1) % vertices.len()];
                for k in 0..per_edge {
                    let u = k as f64 / per_edge as f64;
                    pts.push([a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]);
                }
            }
            pts
        }
        _ => (0..samples)
            .map(|j| {
                let p = shape.point(2.0 * PI * j as f64 / samples as f64);
                [p.r, p.z]
            })
            .collect(),
    }
}

/// `(r_min, r_max, h)` of a polyline.
pub fn extents(points: &[[f64; 2]]) -> (f64, f64, f64) {
    let r_min = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let r_max = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let h = points.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
    (r_min, r_max, h)
}

/// Length of the polyline segments whose outward normal has `n_r > b`.
pub fn surface_set(points: &[[f64; 2]], b: f64) -> f64 {
    let n = points.len();
    (0..n)
        .map(|i| {
            let a = points[i];
            let c = points[(i + 1) % n];
            let (dr, dz) = (c[0] - a[0], c[1] - a[1]);
            let len = dr.hypot(dz);
            if dz / len > b {
                len
            } else {
                0.0
            }
        })
        .sum()
}

/// Closed form of `∫_E r⁻² dA` for the ellipse `(r₀ + m cos t, n sin t)`.
pub fn ellipse_inverse_square(r0: f64, m: f64, n: f64) -> f64 {
    2.0 * PI * n / m * (r0 / (r0 * r0 - m * m).sqrt() - 1.0)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
