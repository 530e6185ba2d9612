//! Meridional cross-sections of axisymmetric rings and their functionals.
//!
//! A cross-section `E` lives in the half plane `{(r, z) : r > 0}`. It is
//! convex, symmetric under `z ↦ −z`, and its boundary is traversed
//! counter-clockwise so that the unit normal `n = (ż, −ṙ)/|ẋ|` points out of
//! `E`. Smooth kinds are parameterized by a uniform angle `t ∈ [0, 2π)` with
//! `t = 0` at the outermost point on the symmetry line; polygons carry their
//! vertices.

mod curve;
mod functionals;
pub mod random;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use curve::{BoundaryNodes, Curvature, CurvePoint};
pub use functionals::{
    boundary_nodes, corollary_implication_check, geometry_report, lemma3_ratio, normalize,
    normalize_shape, polygon_radius_ratio, surface_set_length, weber_number, width_height,
    ConversionFactors, ErrorEstimates, GeometryReport, Normalized, WidthProfile,
};

/// Default node count for smooth kinds.
pub const DEFAULT_RESOLUTION: usize = 512;
/// Upper limit for automatic refinement in [`geometry_report`].
pub const MAX_RESOLUTION: usize = 8192;
/// Admitted negative curvature, in units of `1/a`.
pub const CONVEXITY_TOLERANCE: f64 = 1e-10;
/// Relative tolerance for the polygon reflection check.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid shape parameter: {0}")]
    InvalidParameter(String),
    #[error("resolution {0} must be even and at least 8")]
    InvalidResolution(usize),
    #[error("cross-section touches or crosses the symmetry axis (r_min = {r_min})")]
    TouchesAxis { r_min: f64 },
    #[error("cross-section is not convex (curvature or turning angle {value} at node {index})")]
    NonConvex { index: usize, value: f64 },
    #[error("cross-section is not symmetric under z -> -z (vertex {index})")]
    NotSymmetric { index: usize },
    #[error("cross-section has non-positive area {0}")]
    DegenerateArea(f64),
    #[error("pointwise mean curvature is undefined on polygons")]
    PointwiseCurvatureUndefined,
    #[error("boundary quadrature did not converge (relative error estimate {estimate:e} at resolution {resolution})")]
    QuadratureNotConverged { estimate: f64, resolution: usize },
    #[error("surface-set level {0} outside [0, 1)")]
    InvalidLevel(f64),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// Shape families. Serialized adjacently tagged, which gives the shape-file
/// layout `{"kind": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ShapeKind {
    /// `((r − r0)/m)² + (z/n)² ≤ 1`.
    Ellipse { r0: f64, m: f64, n: f64 },
    Disk { r0: f64, radius: f64 },
    /// Polar radius `base + Σ_j coeffs[j] cos((j+1) t)` about `(r0, 0)`.
    FourierStar {
        r0: f64,
        base: f64,
        coeffs: Vec<f64>,
    },
    /// Vertices `(r, z)`; either orientation is accepted.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl ShapeKind {
    pub fn is_polygon(&self) -> bool {
        matches!(self, ShapeKind::Polygon { .. })
    }

    /// Dilation about the origin of the meridional plane.
    pub fn scaled(&self, s: f64) -> ShapeKind {
        match self {
            ShapeKind::Ellipse { r0, m, n } => ShapeKind::Ellipse {
                r0: r0 * s,
                m: m * s,
                n: n * s,
            },
            ShapeKind::Disk { r0, radius } => ShapeKind::Disk {
                r0: r0 * s,
                radius: radius * s,
            },
            ShapeKind::FourierStar { r0, base, coeffs } => ShapeKind::FourierStar {
                r0: r0 * s,
                base: base * s,
                coeffs: coeffs.iter().map(|c| c * s).collect(),
            },
            ShapeKind::Polygon { vertices } => ShapeKind::Polygon {
                vertices: vertices.iter().map(|v| [v[0] * s, v[1] * s]).collect(),
            },
        }
    }
}

/// On-disk shape definition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeFile {
    #[serde(flatten)]
    pub kind: ShapeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

/// A validated cross-section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeFile", into = "ShapeFile")]
pub struct CrossSection {
    kind: ShapeKind,
    resolution: usize,
}

impl TryFrom<ShapeFile> for CrossSection {
    type Error = GeometryError;

    fn try_from(file: ShapeFile) -> Result<Self, Self::Error> {
        CrossSection::new(file.kind, file.resolution.unwrap_or(DEFAULT_RESOLUTION))
    }
}

impl From<CrossSection> for ShapeFile {
    fn from(shape: CrossSection) -> Self {
        ShapeFile {
            kind: shape.kind,
            resolution: Some(shape.resolution),
        }
    }
}

impl CrossSection {
    /// Validates every cross-section invariant. Polygons are stored
    /// counter-clockwise.
    pub fn new(kind: ShapeKind, resolution: usize) -> Result<Self, GeometryError> {
        if resolution < 8 || !resolution.is_multiple_of(2) {
            return Err(GeometryError::InvalidResolution(resolution));
        }
        let kind = match kind {
            ShapeKind::Polygon { vertices } => ShapeKind::Polygon {
                vertices: validate_polygon(vertices)?,
            },
            other => {
                validate_smooth(&other, resolution)?;
                other
            }
        };
        Ok(CrossSection { kind, resolution })
    }

    /// Convenience constructor at [`DEFAULT_RESOLUTION`].
    pub fn from_kind(kind: ShapeKind) -> Result<Self, GeometryError> {
        Self::new(kind, DEFAULT_RESOLUTION)
    }

    pub fn ellipse(r0: f64, m: f64, n: f64) -> Result<Self, GeometryError> {
        Self::from_kind(ShapeKind::Ellipse { r0, m, n })
    }

    pub fn disk(r0: f64, radius: f64) -> Result<Self, GeometryError> {
        Self::from_kind(ShapeKind::Disk { r0, radius })
    }

    pub fn fourier_star(r0: f64, base: f64, coeffs: Vec<f64>) -> Result<Self, GeometryError> {
        Self::from_kind(ShapeKind::FourierStar { r0, base, coeffs })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self, GeometryError> {
        Self::from_kind(ShapeKind::Polygon { vertices })
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn is_polygon(&self) -> bool {
        self.kind.is_polygon()
    }

    pub fn with_resolution(&self, resolution: usize) -> Result<Self, GeometryError> {
        if resolution < 8 || !resolution.is_multiple_of(2) {
            return Err(GeometryError::InvalidResolution(resolution));
        }
        Ok(CrossSection {
            kind: self.kind.clone(),
            resolution,
        })
    }

    /// Dilation by `s > 0`; all invariants are scale-invariant.
    pub fn scaled(&self, s: f64) -> Result<Self, GeometryError> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(GeometryError::NonPositive {
                name: "scale factor",
                value: s,
            });
        }
        Ok(CrossSection {
            kind: self.kind.scaled(s),
            resolution: self.resolution,
        })
    }

    /// Point and derivatives of a smooth kind at parameter `t`.
    ///
    /// Panics on polygons; check [`CrossSection::is_polygon`] first.
    pub fn point(&self, t: f64) -> CurvePoint {
        curve::smooth_point(&self.kind, t).expect("point() called on a polygon")
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, GeometryError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(GeometryError::NonPositive { name, value })
    }
}

fn validate_smooth(kind: &ShapeKind, resolution: usize) -> Result<(), GeometryError> {
    match kind {
        ShapeKind::Ellipse { r0, m, n } => {
            positive("r0", *r0)?;
            positive("m", *m)?;
            positive("n", *n)?;
            if r0 - m <= 0.0 {
                return Err(GeometryError::TouchesAxis { r_min: r0 - m });
            }
        }
        ShapeKind::Disk { r0, radius } => {
            positive("r0", *r0)?;
            positive("radius", *radius)?;
            if r0 - radius <= 0.0 {
                return Err(GeometryError::TouchesAxis {
                    r_min: r0 - radius,
                });
            }
        }
        ShapeKind::FourierStar { r0, base, coeffs } => {
            positive("r0", *r0)?;
            positive("base", *base)?;
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(GeometryError::InvalidParameter(
                    "non-finite Fourier coefficient".into(),
                ));
            }
            // Sample finely enough to resolve the highest mode.
            let samples = resolution.max(64 * (coeffs.len() + 1)).max(1024);
            let a_scale = base; // curvature tolerance is relative to 1/a
            let mut r_min = f64::INFINITY;
            for i in 0..samples {
                let t = 2.0 * std::f64::consts::PI * i as f64 / samples as f64;
                let rho = curve::star_radius(*base, coeffs, t).0;
                if rho <= 0.0 {
                    return Err(GeometryError::InvalidParameter(format!(
                        "polar radius {rho} not positive at t = {t}"
                    )));
                }
                let p = curve::smooth_point(kind, t).expect("smooth kind");
                r_min = r_min.min(p.r);
                let kappa = p.curvature();
                if kappa < -CONVEXITY_TOLERANCE / a_scale {
                    return Err(GeometryError::NonConvex { index: i, value: kappa });
                }
            }
            if r_min <= 0.0 {
                return Err(GeometryError::TouchesAxis { r_min });
            }
        }
        ShapeKind::Polygon { .. } => unreachable!(),
    }
    Ok(())
}

fn validate_polygon(mut vertices: Vec<[f64; 2]>) -> Result<Vec<[f64; 2]>, GeometryError> {
    let n = vertices.len();
    if n < 3 {
        return Err(GeometryError::InvalidParameter(format!(
            "polygon needs at least 3 vertices, got {n}"
        )));
    }
    if vertices.iter().flatten().any(|c| !c.is_finite()) {
        return Err(GeometryError::InvalidParameter("non-finite vertex".into()));
    }
    let r_min = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
    if r_min <= 0.0 {
        return Err(GeometryError::TouchesAxis { r_min });
    }
    let signed_area = functionals::shoelace(&vertices);
    if signed_area == 0.0 {
        return Err(GeometryError::DegenerateArea(0.0));
    }
    if signed_area < 0.0 {
        vertices.reverse();
    }
    let scale = vertices
        .iter()
        .map(|v| v[0].abs().max(v[1].abs()))
        .fold(0.0, f64::max);
    for i in 0..n {
        let a = vertices[(i + n - 1) % n];
        let b = vertices[i];
        let c = vertices[(i + 1) % n];
        if (b[0] - c[0]).hypot(b[1] - c[1]) <= 1e-14 * scale {
            return Err(GeometryError::InvalidParameter(format!(
                "repeated vertex at index {i}"
            )));
        }
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross < -CONVEXITY_TOLERANCE * scale * scale {
            return Err(GeometryError::NonConvex { index: i, value: cross });
        }
    }
    let tol = SYMMETRY_TOLERANCE * scale;
    for (i, v) in vertices.iter().enumerate() {
        let mirrored = vertices
            .iter()
            .any(|w| (w[0] - v[0]).abs() <= tol && (w[1] + v[1]).abs() <= tol);
        if !mirrored {
            return Err(GeometryError::NotSymmetric { index: i });
        }
    }
    Ok(vertices)
}

/// Density, surface tension and circulation of the physical problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub rho: f64,
    pub sigma: f64,
    pub beta: f64,
}

impl PhysicalParams {
    pub fn new(rho: f64, sigma: f64, beta: f64) -> Result<Self, GeometryError> {
        Ok(PhysicalParams {
            rho: positive("rho", rho)?,
            sigma: positive("sigma", sigma)?,
            beta: positive("beta", beta)?,
        })
    }
}
