use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ShapeKind;

/// Position and first two parameter derivatives of a smooth boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub r: f64,
    pub z: f64,
    pub dr: f64,
    pub dz: f64,
    pub ddr: f64,
    pub ddz: f64,
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        self.dr.hypot(self.dz)
    }

    /// Outward unit normal for a counter-clockwise curve.
    pub fn normal(&self) -> [f64; 2] {
        let s = self.speed();
        [self.dz / s, -self.dr / s]
    }

    /// Signed curvature, positive where the curve bends towards the inside.
    pub fn curvature(&self) -> f64 {
        (self.dr * self.ddz - self.dz * self.ddr) / self.speed().powi(3)
    }
}

/// `(ρ, ρ', ρ'')` of the polar radius of a Fourier star.
pub(crate) fn star_radius(base: f64, coeffs: &[f64], t: f64) -> (f64, f64, f64) {
    let mut rho = base;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for (j, c) in coeffs.iter().enumerate() {
        let k = (j + 1) as f64;
        let (s, co) = (k * t).sin_cos();
        rho += c * co;
        d1 -= k * c * s;
        d2 -= k * k * c * co;
    }
    (rho, d1, d2)
}

pub(crate) fn smooth_point(kind: &ShapeKind, t: f64) -> Option<CurvePoint> {
    let (s, c) = t.sin_cos();
    let p = match kind {
        ShapeKind::Ellipse { r0, m, n } => CurvePoint {
            r: r0 + m * c,
            z: n * s,
            dr: -m * s,
            dz: n * c,
            ddr: -m * c,
            ddz: -n * s,
        },
        ShapeKind::Disk { r0, radius } => CurvePoint {
            r: r0 + radius * c,
            z: radius * s,
            dr: -radius * s,
            dz: radius * c,
            ddr: -radius * c,
            ddz: -radius * s,
        },
        ShapeKind::FourierStar { r0, base, coeffs } => {
            let (rho, d1, d2) = star_radius(*base, coeffs, t);
            CurvePoint {
                r: r0 + rho * c,
                z: rho * s,
                dr: d1 * c - rho * s,
                dz: d1 * s + rho * c,
                ddr: d2 * c - 2.0 * d1 * s - rho * c,
                ddz: d2 * s + 2.0 * d1 * c - rho * s,
            }
        }
        ShapeKind::Polygon { .. } => return None,
    };
    Some(p)
}

/// How curvature is carried by a sampled boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    /// Signed curvature at each node (smooth kinds).
    Pointwise(Vec<f64>),
    /// Exterior angle at each polygon vertex.
    TurningAngles(Vec<f64>),
}

/// A sampled boundary.
///
/// Smooth kinds: `N` equispaced parameters `t_j = 2πj/N`, weights
/// `2π/N · |ẋ(t_j)|` (the periodic trapezoidal rule). Polygons: one node per
/// edge at its midpoint, weight equal to the edge length, and the turning
/// angles at the vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryNodes {
    pub param: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub speed: Vec<f64>,
    pub weights: Vec<f64>,
    pub curvature: Curvature,
}

impl BoundaryNodes {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Pointwise curvature, if the boundary is smooth.
    pub fn pointwise_curvature(&self) -> Option<&[f64]> {
        match &self.curvature {
            Curvature::Pointwise(k) => Some(k),
            Curvature::TurningAngles(_) => None,
        }
    }

    /// `∮ κ ds`: trapezoidal sum for smooth kinds, sum of turning angles for
    /// polygons.
    pub fn total_curvature(&self) -> f64 {
        match &self.curvature {
            Curvature::Pointwise(k) => k.iter().zip(&self.weights).map(|(k, w)| k * w).sum(),
            Curvature::TurningAngles(a) => a.iter().sum(),
        }
    }

    pub(crate) fn sample_smooth(kind: &ShapeKind, count: usize) -> BoundaryNodes {
        let h = 2.0 * PI / count as f64;
        let mut nodes = BoundaryNodes {
            param: Vec::with_capacity(count),
            points: Vec::with_capacity(count),
            normals: Vec::with_capacity(count),
            speed: Vec::with_capacity(count),
            weights: Vec::with_capacity(count),
            curvature: Curvature::Pointwise(Vec::with_capacity(count)),
        };
        let mut kappa = Vec::with_capacity(count);
        for j in 0..count {
            let t = h * j as f64;
            let p = smooth_point(kind, t).expect("smooth kind");
            let speed = p.speed();
            nodes.param.push(t);
            nodes.points.push([p.r, p.z]);
            nodes.normals.push(p.normal());
            nodes.speed.push(speed);
            nodes.weights.push(h * speed);
            kappa.push(p.curvature());
        }
        nodes.curvature = Curvature::Pointwise(kappa);
        nodes
    }

    pub(crate) fn sample_polygon(vertices: &[[f64; 2]]) -> BoundaryNodes {
        let n = vertices.len();
        let mut nodes = BoundaryNodes {
            param: Vec::with_capacity(n),
            points: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            speed: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            curvature: Curvature::TurningAngles(Vec::new()),
        };
        let mut turning = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let (dr, dz) = (b[0] - a[0], b[1] - a[1]);
            let len = dr.hypot(dz);
            nodes.param.push(i as f64 + 0.5);
            nodes.points.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            nodes.normals.push([dz / len, -dr / len]);
            nodes.speed.push(len);
            nodes.weights.push(len);

            // exterior angle at vertex i between incoming and outgoing edges
            let p = vertices[(i + n - 1) % n];
            let (ir, iz) = (a[0] - p[0], a[1] - p[1]);
            let cross = ir * dz - iz * dr;
            let dot = ir * dr + iz * dz;
            turning.push(cross.atan2(dot));
        }
        nodes.curvature = Curvature::TurningAngles(turning);
        nodes
    }
}
