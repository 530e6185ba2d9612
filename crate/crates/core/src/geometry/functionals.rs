use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::curve::smooth_point;
use super::{
    BoundaryNodes, CrossSection, GeometryError, PhysicalParams, ShapeKind, MAX_RESOLUTION,
};

/// Doubling stops once `∫_E r⁻² dA` changes by less than this (relative).
const REFINE_TOLERANCE: f64 = 1e-9;
/// A report is refused if the error estimate at the finest level exceeds this.
const ACCEPT_TOLERANCE: f64 = 1e-8;

/// Sampled boundary of a validated shape, at the shape's resolution.
pub fn boundary_nodes(shape: &CrossSection) -> BoundaryNodes {
    match shape.kind() {
        ShapeKind::Polygon { vertices } => BoundaryNodes::sample_polygon(vertices),
        kind => BoundaryNodes::sample_smooth(kind, shape.resolution()),
    }
}

/// Twice-signed shoelace area; positive for counter-clockwise vertices.
pub(crate) fn shoelace(vertices: &[[f64; 2]]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        * 0.5
}

/// Boundary integrals from which every area functional is recovered by the
/// divergence theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Integrals {
    /// `|E| = ∮ r n_r ds`
    area: f64,
    /// `∫_E r dA = ∮ r²/2 n_r ds`
    first_moment: f64,
    /// `∫_E r⁻² dA = −∮ n_r / r ds`
    inverse_square: f64,
    /// `∮ κ ds`
    total_curvature: f64,
    /// `∮ n_r / r ds`
    azimuthal: f64,
    perimeter: f64,
}

impl Integrals {
    fn smooth(kind: &ShapeKind, count: usize) -> Integrals {
        let nodes = BoundaryNodes::sample_smooth(kind, count);
        let mut acc = Integrals {
            area: 0.0,
            first_moment: 0.0,
            inverse_square: 0.0,
            total_curvature: nodes.total_curvature(),
            azimuthal: 0.0,
            perimeter: nodes.perimeter(),
        };
        for ((p, n), w) in nodes.points.iter().zip(&nodes.normals).zip(&nodes.weights) {
            let r = p[0];
            let flux = n[0] * w;
            acc.area += r * flux;
            acc.first_moment += 0.5 * r * r * flux;
            acc.azimuthal += flux / r;
        }
        acc.inverse_square = -acc.azimuthal;
        acc
    }

    fn polygon(vertices: &[[f64; 2]]) -> Integrals {
        let nodes = BoundaryNodes::sample_polygon(vertices);
        let n = vertices.len();
        let mut area = 0.0;
        let mut first_moment = 0.0;
        let mut azimuthal = 0.0;
        for i in 0..n {
            let [ra, za] = vertices[i];
            let [rb, zb] = vertices[(i + 1) % n];
            let dz = zb - za;
            area += 0.5 * (ra + rb) * dz;
            first_moment += dz / 6.0 * (ra * ra + ra * rb + rb * rb);
            azimuthal += dz * inverse_mean(ra, rb);
        }
        Integrals {
            area,
            first_moment,
            inverse_square: -azimuthal,
            total_curvature: nodes.total_curvature(),
            azimuthal,
            perimeter: nodes.perimeter(),
        }
    }
}

/// `∫₀¹ ds / (a + s (b − a))`, stable when `a ≈ b`.
fn inverse_mean(a: f64, b: f64) -> f64 {
    let x = (b - a) / a;
    if x == 0.0 {
        1.0 / a
    } else {
        x.ln_1p() / (x * a)
    }
}

/// Absolute error estimates (difference between the last two refinement
/// levels; zero for polygons, whose formulas are exact).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorEstimates {
    pub area: f64,
    pub major_radius: f64,
    pub inverse_square_integral: f64,
    pub total_mean_curvature: f64,
}

/// Every scalar functional of a cross-section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub area: f64,
    /// Area-averaged radial coordinate `R = |E|⁻¹ ∫_E r dA`.
    pub major_radius: f64,
    /// `a = √(|E| / 2π)`.
    pub minor_radius: f64,
    /// `R / a`.
    pub mu: f64,
    /// `R / √|E|`, the alternative aspect convention.
    pub mu_sqrt_area: f64,
    /// `∫_E r⁻² dA − 2π`.
    pub delta: f64,
    pub inverse_square_integral: f64,
    /// `∮ H ds` with `H = κ + n·e_r / r`.
    pub total_mean_curvature: f64,
    /// `∮ κ ds`.
    pub total_curvature: f64,
    pub r_max: f64,
    pub r_min: f64,
    /// Half height `h = max z`.
    pub height: f64,
    pub perimeter: f64,
    /// Non-positive total mean curvature.
    pub is_thick: bool,
    /// Node count the integrals were taken at (vertex count for polygons).
    pub resolution: usize,
    pub error_estimates: ErrorEstimates,
}

/// Computes the [`GeometryReport`]. Smooth kinds start at the shape's
/// resolution and double until `∫_E r⁻² dA` settles.
pub fn geometry_report(shape: &CrossSection) -> Result<GeometryReport, GeometryError> {
    let (integrals, errors, resolution) = match shape.kind() {
        ShapeKind::Polygon { vertices } => (
            Integrals::polygon(vertices),
            ErrorEstimates::default(),
            vertices.len(),
        ),
        kind => refine(kind, shape.resolution())?,
    };
    let (r_min, r_max, height) = extents(shape);
    let area = integrals.area;
    if area <= 0.0 {
        return Err(GeometryError::DegenerateArea(area));
    }
    let major_radius = integrals.first_moment / area;
    let minor_radius = (area / (2.0 * PI)).sqrt();
    let total_mean_curvature = integrals.total_curvature + integrals.azimuthal;
    Ok(GeometryReport {
        area,
        major_radius,
        minor_radius,
        mu: major_radius / minor_radius,
        mu_sqrt_area: major_radius / area.sqrt(),
        delta: integrals.inverse_square - 2.0 * PI,
        inverse_square_integral: integrals.inverse_square,
        total_mean_curvature,
        total_curvature: integrals.total_curvature,
        r_max,
        r_min,
        height,
        perimeter: integrals.perimeter,
        is_thick: total_mean_curvature <= 0.0,
        resolution,
        error_estimates: errors,
    })
}

fn refine(kind: &ShapeKind, start: usize) -> Result<(Integrals, ErrorEstimates, usize), GeometryError> {
    let mut count = start;
    let mut coarse = Integrals::smooth(kind, count);
    loop {
        let fine_count = count * 2;
        let fine = Integrals::smooth(kind, fine_count);
        let estimate = (fine.inverse_square - coarse.inverse_square).abs() / fine.inverse_square.abs();
        let done = estimate <= REFINE_TOLERANCE;
        if done || fine_count >= MAX_RESOLUTION {
            if !done && estimate > ACCEPT_TOLERANCE {
                return Err(GeometryError::QuadratureNotConverged {
                    estimate,
                    resolution: fine_count,
                });
            }
            let errors = ErrorEstimates {
                area: (fine.area - coarse.area).abs(),
                major_radius: (fine.first_moment / fine.area - coarse.first_moment / coarse.area).abs(),
                inverse_square_integral: (fine.inverse_square - coarse.inverse_square).abs(),
                total_mean_curvature: (fine.total_curvature + fine.azimuthal
                    - coarse.total_curvature
                    - coarse.azimuthal)
                    .abs(),
            };
            return Ok((fine, errors, fine_count));
        }
        count = fine_count;
        coarse = fine;
    }
}

/// Golden-section refinement of a sampled maximum of a 2π-periodic `f`.
fn periodic_max(f: impl Fn(f64) -> f64, samples: usize) -> (f64, f64) {
    let h = 2.0 * PI / samples as f64;
    let (best, _) = (0..samples)
        .map(|i| (i, f(h * i as f64)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    golden_max(&f, h * best as f64 - h, h * best as f64 + h)
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `(r_min, r_max, h)`.
fn extents(shape: &CrossSection) -> (f64, f64, f64) {
    match shape.kind() {
        ShapeKind::Polygon { vertices } => {
            let r_min = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let r_max = vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
            let h = vertices.iter().map(|v| v[1]).fold(f64::NEG_INFINITY, f64::max);
            (r_min, r_max, h)
        }
        kind => {
            let samples = shape.resolution().max(256);
            let at = |t: f64| smooth_point(kind, t).expect("smooth kind");
            let (_, r_max) = periodic_max(|t| at(t).r, samples);
            let (_, neg_r_min) = periodic_max(|t| -at(t).r, samples);
            let (_, h) = periodic_max(|t| at(t).z, samples);
            (-neg_r_min, r_max, h)
        }
    }
}

/// Horizontal width `w(z) = R_max(z) − R_min(z)` on a uniform grid of
/// levels in `[−h, h]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthProfile {
    pub levels: Vec<f64>,
    pub widths: Vec<f64>,
    pub height: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// `r_max − r_min`.
    pub delta_r: f64,
}

pub fn width_height(shape: &CrossSection) -> WidthProfile {
    let (r_min, r_max, height) = extents(shape);
    let count = (shape.resolution() / 2).max(16) + 1;
    let levels: Vec<f64> = (0..count)
        .map(|j| -height + 2.0 * height * j as f64 / (count - 1) as f64)
        .collect();
    let widths = match shape.kind() {
        ShapeKind::Polygon { vertices } => levels
            .iter()
            .map(|&z| polygon_width(vertices, z))
            .collect(),
        kind => {
            let at = |t: f64| smooth_point(kind, t).expect("smooth kind");
            let samples = shape.resolution().max(256);
            // top point lies in (0, π) by symmetry; restrict the search there
            let (t_top, _) = periodic_max(|t| if t.rem_euclid(2.0 * PI) < PI { at(t).z } else { f64::NEG_INFINITY }, samples);
            let t_top = t_top.rem_euclid(2.0 * PI);
            levels
                .iter()
                .map(|&z| {
                    let z = z.clamp(-height, height);
                    // right arc: z increasing on [−t_top, t_top]
                    let tr = bisect(|t| at(t).z - z, -t_top, t_top);
                    // left arc: z decreasing on [t_top, 2π − t_top]
                    let tl = bisect(|t| z - at(t).z, t_top, 2.0 * PI - t_top);
                    (at(tr).r - at(tl).r).max(0.0)
                })
                .collect()
        }
    };
    WidthProfile {
        levels,
        widths,
        height,
        r_min,
        r_max,
        delta_r: r_max - r_min,
    }
}

fn polygon_width(vertices: &[[f64; 2]], z: f64) -> f64 {
    let n = vertices.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let (zmin, zmax) = (a[1].min(b[1]), a[1].max(b[1]));
        if z < zmin || z > zmax {
            continue;
        }
        if a[1] == b[1] {
            lo = lo.min(a[0].min(b[0]));
            hi = hi.max(a[0].max(b[0]));
        } else {
            let s = (z - a[1]) / (b[1] - a[1]);
            let r = a[0] + s * (b[0] - a[0]);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

/// Root of an increasing function on `[lo, hi]` by bisection.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Arc length of `S(b) = {x ∈ ∂E : n(x)·e_r > b}` for `0 ≤ b < 1`.
///
/// On a convex symmetric curve the normal angle is monotone, so `S(b)` is
/// the single arc `t ∈ (−t*, t*)` with `n_r(t*) = b`; its length is
/// integrated with composite Gauss–Legendre.
pub fn surface_set_length(shape: &CrossSection, b: f64) -> Result<f64, GeometryError> {
    if !(0.0..1.0).contains(&b) {
        return Err(GeometryError::InvalidLevel(b));
    }
    match shape.kind() {
        ShapeKind::Polygon { vertices } => {
            let nodes = BoundaryNodes::sample_polygon(vertices);
            Ok(nodes
                .normals
                .iter()
                .zip(&nodes.weights)
                .filter(|(n, _)| n[0] > b)
                .map(|(_, w)| w)
                .sum())
        }
        kind => {
            let at = |t: f64| smooth_point(kind, t).expect("smooth kind");
            // n_r decreases from 1 at t = 0 to −1 at t = π
            let t_star = bisect(|t| b - at(t).normal()[0], 0.0, PI);
            Ok(2.0 * arc_length(|t| at(t).speed(), 0.0, t_star))
        }
    }
}

fn arc_length(speed: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const PANELS: usize = 16;
    let rule = GaussLegendre::new(24).expect("valid degree");
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + h * i as f64;
            rule.integrate(lo, lo + h, &speed)
        })
        .sum()
}

/// `R_max / R`; never exceeds 3 on convex sets.
pub fn lemma3_ratio(shape: &CrossSection) -> Result<f64, GeometryError> {
    let report = geometry_report(shape)?;
    let k = report.r_max / report.major_radius;
    debug_assert!(k <= 3.0 + 1e-10, "R_max/R = {k}");
    Ok(k)
}

/// `R_max / R` for a convex polygon in the closed half plane `r ≥ 0`,
/// so that sets with a side on the axis are admitted.
pub fn polygon_radius_ratio(vertices: &[[f64; 2]]) -> Result<f64, GeometryError> {
    if vertices.len() < 3 {
        return Err(GeometryError::InvalidParameter(
            "polygon needs at least 3 vertices".into(),
        ));
    }
    if let Some(v) = vertices.iter().find(|v| v[0] < 0.0 || !v[0].is_finite()) {
        return Err(GeometryError::TouchesAxis { r_min: v[0] });
    }
    let area = shoelace(vertices);
    if area == 0.0 {
        return Err(GeometryError::DegenerateArea(0.0));
    }
    let n = vertices.len();
    let moment: f64 = (0..n)
        .map(|i| {
            let [ra, za] = vertices[i];
            let [rb, zb] = vertices[(i + 1) % n];
            (zb - za) / 6.0 * (ra * ra + ra * rb + rb * rb)
        })
        .sum();
    let r_max = vertices.iter().map(|v| v[0]).fold(0.0, f64::max);
    // signs of area and moment flip together with orientation
    Ok(r_max * area / moment)
}

/// Circulation-based Weber number `√(2π) ρ β² / (σ √|E|)`.
pub fn weber_number(params: &PhysicalParams, area: f64) -> Result<f64, GeometryError> {
    let params = PhysicalParams::new(params.rho, params.sigma, params.beta)?;
    if !(area > 0.0 && area.is_finite()) {
        return Err(GeometryError::NonPositive { name: "area", value: area });
    }
    Ok((2.0 * PI).sqrt() * params.rho * params.beta * params.beta / (params.sigma * area.sqrt()))
}

/// Multipliers turning physical constants into normalized ones:
/// `Ŵ = w·W`, `γ̂ = gamma·γ`, `λ̂ = lambda·λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionFactors {
    /// `a / β`
    pub w: f64,
    /// `1 / (a β)`
    pub gamma: f64,
    /// `a / σ`
    pub lambda: f64,
}

/// A shape rescaled to area `2π`.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub shape: CrossSection,
    /// Minor radius of the input shape; lengths were divided by it.
    pub minor_radius: f64,
}

pub fn normalize_shape(shape: &CrossSection) -> Result<Normalized, GeometryError> {
    let area = match shape.kind() {
        ShapeKind::Polygon { vertices } => Integrals::polygon(vertices).area,
        kind => refine(kind, shape.resolution())?.0.area,
    };
    let a = (area / (2.0 * PI)).sqrt();
    Ok(Normalized {
        shape: shape.scaled(1.0 / a)?,
        minor_radius: a,
    })
}

/// Rescales to `|E| = 2π` and returns the conversion factors for the
/// translation speed, flux constant and Bernoulli constant.
pub fn normalize(
    shape: &CrossSection,
    params: &PhysicalParams,
) -> Result<(Normalized, ConversionFactors), GeometryError> {
    let params = PhysicalParams::new(params.rho, params.sigma, params.beta)?;
    let normalized = normalize_shape(shape)?;
    let a = normalized.minor_radius;
    let factors = ConversionFactors {
        w: a / params.beta,
        gamma: 1.0 / (a * params.beta),
        lambda: a / params.sigma,
    };
    Ok((normalized, factors))
}

/// Checks on one shape that `2πR² ≤ |E|` implies `δ ≥ 0`.
/// Always `true` for valid shapes; used as a test oracle.
pub fn corollary_implication_check(shape: &CrossSection) -> Result<bool, GeometryError> {
    let report = geometry_report(shape)?;
    let fat = 2.0 * PI * report.major_radius.powi(2) <= report.area;
    Ok(!fat || report.delta >= -1e-10)
}
