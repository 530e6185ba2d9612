//! Random convex symmetric cross-sections for property checks.
//!
//! All generators take the RNG by reference and are deterministic given its
//! state.

use std::f64::consts::PI;

use rand::Rng;

use super::{geometry_report, CrossSection, ShapeKind};

/// Smallest `r_min / a` the polygon generator produces.
pub const MIN_AXIS_GAP: f64 = 0.1;

/// Convex hull (counter-clockwise, collinear points dropped) by the
/// monotone-chain algorithm.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Convex polygon symmetric in `z`: random radial values on a symmetric
/// angle grid, their hull, then a shift so that `r_min / a` lies in
/// `[0.1, 2)`.
pub fn random_convex_polygon<R: Rng + ?Sized>(rng: &mut R) -> CrossSection {
    loop {
        let upper = rng.gen_range(1..=6);
        let mut points = Vec::with_capacity(2 * upper + 2);
        for i in 0..upper {
            let slot = PI / (upper + 1) as f64;
            let theta = slot * (i as f64 + rng.gen_range(0.6..1.4));
            let radius = rng.gen_range(0.3..1.5);
            let (s, c) = theta.sin_cos();
            points.push([radius * c, radius * s]);
            points.push([radius * c, -radius * s]);
        }
        if rng.gen_bool(0.7) {
            points.push([rng.gen_range(0.3..1.5), 0.0]);
        }
        if rng.gen_bool(0.7) {
            points.push([-rng.gen_range(0.3..1.5), 0.0]);
        }
        let hull = convex_hull(&points);
        if hull.len() < 3 {
            continue;
        }
        let scale = rng.gen_range(0.3..3.0);
        let mut vertices: Vec<[f64; 2]> = hull.iter().map(|p| [p[0] * scale, p[1] * scale]).collect();
        let area = super::functionals::shoelace(&vertices);
        let a = (area / (2.0 * PI)).sqrt();
        let r_min = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        let shift = rng.gen_range(MIN_AXIS_GAP..2.0) * a - r_min;
        vertices.iter_mut().for_each(|v| v[0] += shift);
        if let Ok(shape) = CrossSection::polygon(vertices) {
            return shape;
        }
    }
}

/// Random ellipse, disk or convex Fourier star with
/// `r_min ∈ [gap.0, gap.1) × size`.
pub fn random_smooth_shape_with_gap<R: Rng + ?Sized>(rng: &mut R, gap: (f64, f64)) -> CrossSection {
    loop {
        let size = rng.gen_range(0.3..3.0);
        let g = rng.gen_range(gap.0..gap.1) * size;
        let kind = match rng.gen_range(0..3) {
            0 => {
                let m = size * rng.gen_range(0.3..1.0);
                let n = size * rng.gen_range(0.3..1.0);
                ShapeKind::Ellipse { r0: m + g, m, n }
            }
            1 => ShapeKind::Disk {
                r0: size + g,
                radius: size,
            },
            _ => {
                let modes = rng.gen_range(1..=5);
                let coeffs: Vec<f64> = (1..=modes)
                    .map(|k| {
                        let k = k as f64;
                        size * rng.gen_range(-0.6..0.6) / (k * k + 1.0)
                    })
                    .collect();
                let reach = size + coeffs.iter().map(|c| c.abs()).sum::<f64>();
                ShapeKind::FourierStar {
                    r0: reach + g,
                    base: size,
                    coeffs,
                }
            }
        };
        if let Ok(shape) = CrossSection::from_kind(kind) {
            return shape;
        }
    }
}

/// Smooth shape with an axis gap in `[0.05, 2) × size`.
pub fn random_smooth_shape<R: Rng + ?Sized>(rng: &mut R) -> CrossSection {
    random_smooth_shape_with_gap(rng, (0.05, 2.0))
}

/// Any kind; roughly one in three is a polygon.
pub fn random_shape<R: Rng + ?Sized>(rng: &mut R) -> CrossSection {
    if rng.gen_bool(0.3) {
        random_convex_polygon(rng)
    } else {
        random_smooth_shape(rng)
    }
}

/// Smooth or polygonal shape with non-negative thickness measure, found by
/// rejection among shapes placed close to the axis.
pub fn random_thick_shape<R: Rng + ?Sized>(rng: &mut R) -> CrossSection {
    loop {
        let shape = if rng.gen_bool(0.3) {
            random_convex_polygon(rng)
        } else {
            random_smooth_shape_with_gap(rng, (0.03, 0.4))
        };
        if geometry_report(&shape).map(|r| r.is_thick).unwrap_or(false) {
            return shape;
        }
    }
}
