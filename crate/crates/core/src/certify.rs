//! Explicit lower bound on the Weber number of a steady thick ring.
//!
//! Units are normalized: `|E| = 2π`, so the minor radius is `a = 1` and the
//! major radius `R` equals the aspect ratio `μ = R/a`. The circulation is 1.
//! Write `h` for the half height, `ΔR = R_max − R_min` for the width,
//! `S(b) = {x ∈ ∂E : n_r > b}` and `q = (1/r) ∂_n ψ − W n_r`.
//!
//! The bound rests on the following chain. Each link is checked on computed
//! geometry by [`proof_chain`].
//!
//! 1. Every horizontal width is at most `R_max ≤ 3R`, so
//!    `2π = ∫ w(z) dz ≤ 6Rh` and `2h ≥ 2π/(3R)`.
//! 2. `S(0)` is a graph `r = f(z)` over `(−h, h)`, so
//!    `|S(0)| ≤ 2h + ∫|f'| dz = 2h + 2R_max ≤ 2h + 6R`.
//! 3. `2h = ∫_{S(0)} n_r ds ≤ |S(b)| + b (|S(0)| − |S(b)|)`, hence
//!    `|S(b)| ≥ 2h − 6bR/(1 − b) ≥ 2π/(3R) − 12bR` for `b ≤ 1/2`.
//!    With `b* = π/(36R²)` when `R > √(π/18)` and `b* = 1/2` otherwise this
//!    gives `|S(b*)| ≥ π/(3R)`. The switch point is where `π/(36R²) = 1/2`;
//!    the inequality `6b/(1 − b) ≤ 12b` fails for `b > 1/2`.
//! 4. On `∂E`, `2H + λ = We q²` and `q ≤ 0` (maximum principle), so with
//!    unit circulation `√We = ∫_{∂E} √(2H + λ) ds`. Convexity gives
//!    `2H ≥ 2n_r/r` on `S(0)`, and `√(x + y) ≥ (√x + √y)/√2`, so
//!    `√We ≥ (u + v)/√2` with
//!    `u = ∫_{S(b*)} √(2n_r/r) ds ≥ √(2b*/R_max) |S(b*)|` and
//!    `v = √λ |S(0)| ≥ 2√λ h`.
//! 5. Squaring, `We ≥ (u² + v²)/2`.
//! 6. `λ|∂E| ≥ δ` and `|∂E| ≤ 4h + 2ΔR`; the right side of
//!    `λh² ≥ δh²/(4h + 2ΔR)` increases with `h` and `h ≥ π/ΔR`, so
//!    `λh² ≥ δπ²/(ΔR (4π + 2ΔR²))`, and `ΔR ≤ 3R`.
//!
//! Universal form, using only `R` and `δ`:
//!
//! ```text
//! u²/2 = π³/(972 R⁵)          (R > √(π/18))
//!      = π²/(54 R³)           (R ≤ √(π/18))
//! v²/2 = 2λh² ≥ 2π²δ/(3R (4π + 18R²))
//! ```
//!
//! and `we_min ≥ (π³/972)/(μ + μ³) · (1/μ² + δ)`. The measured form keeps
//! `R_max`, `|S(b*)|`, `h` and `|∂E|` of the actual shape in steps 4 and 6
//! and is never smaller.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{geometry_report, normalize_shape, surface_set_length, CrossSection, GeometryError, GeometryReport};

/// Allowed deviation of the area from `2π` for a normalized report.
pub const AREA_TOLERANCE: f64 = 1e-10;

/// Constant `c` in `we_min ≥ c/(μ + μ³)(1/μ² + δ)`.
pub const BOUND_FORM_CONSTANT: f64 = PI * PI * PI / 972.0;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("report is not normalized: area {area} differs from 2π")]
    NotNormalized { area: f64 },
    #[error("epsilon {eps} must lie in (0, r0 = {r0})")]
    InvalidEpsilon { eps: f64, r0: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `R > √(π/18)`, `b* = π/(36R²)`.
    LargeRadius,
    /// `R ≤ √(π/18)`, `b* = 1/2`.
    SmallRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    RuledOut,
    NotRuledOut,
}

/// Bound using the measured intermediate quantities of one shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredBound {
    pub surface_set_length: f64,
    pub r_max: f64,
    pub height: f64,
    pub perimeter: f64,
    pub term_curvature: f64,
    pub term_bernoulli: f64,
    pub we_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    /// `R/a`.
    pub mu: f64,
    /// `R/√|E| = μ/√(2π)`.
    pub mu_sqrt_area: f64,
    pub delta: f64,
    pub is_thick: bool,
    pub branch: Branch,
    pub b_star: f64,
    pub term_curvature: f64,
    pub term_bernoulli: f64,
    /// Universal bound `term_curvature + term_bernoulli`.
    pub we_min: f64,
    pub measured: Option<MeasuredBound>,
}

impl BoundCertificate {
    pub fn verdict(&self, we: f64) -> Verdict {
        verdict(self, we, self.is_thick)
    }

    /// Verdict from the measured bound, when present.
    pub fn measured_verdict(&self, we: f64) -> Option<Verdict> {
        self.measured.as_ref().map(|m| {
            if self.is_thick && we < m.we_min {
                Verdict::RuledOut
            } else {
                Verdict::NotRuledOut
            }
        })
    }
}

/// `RuledOut` iff the shape is thick and `we < we_min`.
pub fn verdict(certificate: &BoundCertificate, we: f64, is_thick: bool) -> Verdict {
    if is_thick && we < certificate.we_min {
        Verdict::RuledOut
    } else {
        Verdict::NotRuledOut
    }
}

/// `R` below which the proof uses `b* = 1/2`.
pub fn branch_threshold() -> f64 {
    (PI / 18.0).sqrt()
}

pub fn b_star(mu: f64) -> (Branch, f64) {
    if mu > branch_threshold() {
        (Branch::LargeRadius, PI / (36.0 * mu * mu))
    } else {
        (Branch::SmallRadius, 0.5)
    }
}

/// `u²/2` with the universal substitutions.
pub fn curvature_term(mu: f64) -> f64 {
    let (_, b) = b_star(mu);
    let u = (2.0 * b / (3.0 * mu)).sqrt() * PI / (3.0 * mu);
    0.5 * u * u
}

/// `2λh²` bounded below through `δ`; zero for thin shapes.
pub fn bernoulli_term(mu: f64, delta: f64) -> f64 {
    2.0 * PI * PI * delta.max(0.0) / (3.0 * mu * (4.0 * PI + 18.0 * mu * mu))
}

/// Universal lower bound as a function of `μ = R/a` and `δ`.
pub fn universal_we_min(mu: f64, delta: f64) -> f64 {
    curvature_term(mu) + bernoulli_term(mu, delta)
}

/// Certificate for a normalized geometry report (universal form only).
pub fn explicit_bound(report: &GeometryReport) -> Result<BoundCertificate, CertifyError> {
    if (report.area - 2.0 * PI).abs() > AREA_TOLERANCE * 2.0 * PI {
        return Err(CertifyError::NotNormalized { area: report.area });
    }
    let mu = report.major_radius;
    let (branch, b) = b_star(mu);
    let term_curvature = curvature_term(mu);
    let term_bernoulli = bernoulli_term(mu, report.delta);
    Ok(BoundCertificate {
        mu,
        mu_sqrt_area: mu / (2.0 * PI).sqrt(),
        delta: report.delta,
        is_thick: report.is_thick,
        branch,
        b_star: b,
        term_curvature,
        term_bernoulli,
        we_min: term_curvature + term_bernoulli,
        measured: None,
    })
}

/// Normalizes `shape` and returns its certificate with both the universal
/// and the measured bound.
pub fn certify_shape(shape: &CrossSection) -> Result<BoundCertificate, CertifyError> {
    let normalized = normalize_shape(shape)?.shape;
    let report = geometry_report(&normalized)?;
    let mut cert = explicit_bound(&report)?;
    let s_len = surface_set_length(&normalized, cert.b_star.min(1.0 - 1e-15))?;
    let u = (2.0 * cert.b_star / report.r_max).sqrt() * s_len;
    let v2 = 4.0 * report.delta.max(0.0) * report.height.powi(2) / report.perimeter;
    let term_curvature = 0.5 * u * u;
    let term_bernoulli = 0.5 * v2;
    cert.measured = Some(MeasuredBound {
        surface_set_length: s_len,
        r_max: report.r_max,
        height: report.height,
        perimeter: report.perimeter,
        term_curvature,
        term_bernoulli,
        we_min: term_curvature + term_bernoulli,
    });
    Ok(cert)
}

/// Margins of the individual inequalities of the bound on one normalized
/// shape; each is `rhs − lhs` of an inequality `lhs ≤ rhs` and is
/// non-negative when it holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainMargins {
    /// `2h − 2π/(3R)`
    pub height: f64,
    /// `|S(b*)| − π/(3R)`
    pub surface_set: f64,
    /// `2h + 6R − |S(0)|`
    pub graph_length: f64,
    /// `hΔR − π`
    pub rectangle: f64,
    /// `3R − ΔR`
    pub width: f64,
    /// `3 − R_max/R`
    pub ratio: f64,
}

impl ChainMargins {
    pub fn worst(&self) -> f64 {
        [self.height, self.surface_set, self.graph_length, self.rectangle, self.width, self.ratio]
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates every geometric link of the chain on the normalized version of
/// `shape`.
pub fn proof_chain(shape: &CrossSection) -> Result<ChainMargins, CertifyError> {
    let normalized = normalize_shape(shape)?.shape;
    let report = geometry_report(&normalized)?;
    let big_r = report.major_radius;
    let h = report.height;
    let delta_r = report.r_max - report.r_min;
    let (_, b) = b_star(big_r);
    let s_b = surface_set_length(&normalized, b.min(1.0 - 1e-15))?;
    let s_0 = surface_set_length(&normalized, 0.0)?;
    Ok(ChainMargins {
        height: 2.0 * h - 2.0 * PI / (3.0 * big_r),
        surface_set: s_b - PI / (3.0 * big_r),
        graph_length: 2.0 * h + 6.0 * big_r - s_0,
        rectangle: h * delta_r - PI,
        width: 3.0 * big_r - delta_r,
        ratio: 3.0 - report.r_max / big_r,
    })
}

/// One row of the near-axis disk scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    /// `ε/R₀`
    pub eps_ratio: f64,
    pub delta: f64,
    /// `δ √(ε/R₀)`
    pub scaled_delta: f64,
    pub mu: f64,
    pub we_min: f64,
}

/// Disks of radius `ρ₀ = R₀ − ε` centred at `R₀`, which approach the axis as
/// `ε → 0`. Uses the closed forms `∫_E r⁻² dA = 2π(R₀/√(R₀² − ρ₀²) − 1)` and
/// `μ = √2 R₀/ρ₀`.
pub fn norbury_scaling_probe(r0: f64, eps: &[f64]) -> Result<Vec<ScalingRow>, CertifyError> {
    eps.iter()
        .map(|&e| {
            if !(e > 0.0 && e < r0) {
                return Err(CertifyError::InvalidEpsilon { eps: e, r0 });
            }
            let rho = r0 - e;
            let gap = (e * (2.0 * r0 - e)).sqrt();
            let delta = 2.0 * PI * (r0 / gap - 1.0) - 2.0 * PI;
            let mu = 2f64.sqrt() * r0 / rho;
            Ok(ScalingRow {
                eps_ratio: e / r0,
                delta,
                scaled_delta: delta * (e / r0).sqrt(),
                mu,
                we_min: universal_we_min(mu, delta),
            })
        })
        .collect()
}
