//! Green's function of `−div((1/r) ∇ψ) = δ` in the meridional half plane,
//! vanishing on the axis and at infinity:
//!
//! ```text
//! G(x̄, x) = √(r r̄)/(2π) · [(2/k − k) K(k) − (2/k) E(k)],
//! k² = 4 r r̄ / ((r + r̄)² + (z − z̄)²).
//! ```
//!
//! It is the stream function of a circular vortex filament of unit
//! circulation through `x̄`. Near the diagonal
//! `G = A ln(1/k') + (smooth)` with `k'² = |x − x̄|² / ((r + r̄)² + (z − z̄)²)`;
//! the Nyström scheme needs `A` and its normal derivative explicitly.

use std::f64::consts::PI;

use crate::specialfn::{ring_log_coefficient, ring_profile};

use super::SolverError;

/// Geometry shared by the kernel and its derivatives for one pair.
#[derive(Debug, Clone, Copy)]
struct Pair {
    r: f64,
    r_src: f64,
    /// target minus source
    d: [f64; 2],
    rho2: f64,
    big_d2: f64,
    k: f64,
    kp: f64,
}

impl Pair {
    fn new(source: [f64; 2], target: [f64; 2]) -> Pair {
        let (r_src, r) = (source[0], target[0]);
        let d = [target[0] - source[0], target[1] - source[1]];
        let rho2 = d[0] * d[0] + d[1] * d[1];
        let sum = r + r_src;
        let big_d2 = sum * sum + d[1] * d[1];
        let big_d = big_d2.sqrt();
        Pair {
            r,
            r_src,
            d,
            rho2,
            big_d2,
            k: 2.0 * (r * r_src).sqrt() / big_d,
            kp: rho2.sqrt() / big_d,
        }
    }

    fn prefactor(&self) -> f64 {
        (self.r * self.r_src).sqrt() / (2.0 * PI)
    }

    /// Derivative of `k²` with respect to the target along `n`.
    fn dn_k2(&self, n: [f64; 2]) -> f64 {
        let d_dot_n = self.d[0] * n[0] + self.d[1] * n[1];
        4.0 * self.r_src / (self.big_d2 * self.big_d2) * (n[0] * self.rho2 - 2.0 * self.r * d_dot_n)
    }

    fn value(&self) -> f64 {
        self.prefactor() * ring_profile(self.k, self.kp).0
    }

    fn dn_value(&self, n: [f64; 2]) -> f64 {
        self.value_and_dn(n).1
    }

    fn value_and_dn(&self, n: [f64; 2]) -> (f64, f64) {
        let (f, df) = ring_profile(self.k, self.kp);
        let dn_k = self.dn_k2(n) / (2.0 * self.k);
        let root_ratio = (self.r_src / self.r).sqrt();
        let dn = (0.5 * root_ratio * f * n[0] + (self.r * self.r_src).sqrt() * df * dn_k) / (2.0 * PI);
        (self.prefactor() * f, dn)
    }
}

fn check_pair(source: [f64; 2], target: [f64; 2]) -> Result<(), SolverError> {
    if !(source[0] > 0.0) || !(target[0] > 0.0) {
        return Err(SolverError::OffHalfPlane);
    }
    if source == target {
        return Err(SolverError::CoincidentPoints);
    }
    Ok(())
}

/// `G(source, target)`. Symmetric in its arguments, positive, vanishing like
/// `r²` at the axis.
pub fn ring_kernel(source: [f64; 2], target: [f64; 2]) -> Result<f64, SolverError> {
    check_pair(source, target)?;
    Ok(Pair::new(source, target).value())
}

/// Gradient of `G(source, ·)` at `target`, as `(∂_r, ∂_z)`.
pub fn ring_kernel_gradient(source: [f64; 2], target: [f64; 2]) -> Result<[f64; 2], SolverError> {
    check_pair(source, target)?;
    let p = Pair::new(source, target);
    Ok([p.dn_value([1.0, 0.0]), p.dn_value([0.0, 1.0])])
}

/// Stream function of a vortex filament through `ring` with the given
/// circulation `strength`, evaluated at `at`.
pub fn filament_stream(ring: [f64; 2], strength: f64, at: [f64; 2]) -> Result<f64, SolverError> {
    if at[0] == 0.0 && ring[0] > 0.0 {
        return Ok(0.0);
    }
    Ok(strength * ring_kernel(ring, at)?)
}

/// Gradient of [`filament_stream`].
pub fn filament_gradient(ring: [f64; 2], strength: f64, at: [f64; 2]) -> Result<[f64; 2], SolverError> {
    let g = ring_kernel_gradient(ring, at)?;
    Ok([strength * g[0], strength * g[1]])
}

/// Kernel pieces for the periodic log-splitting quadrature on a smooth
/// boundary:
///
/// ```text
/// G  = G₁ ln(4 sin²((t − τ)/2)) + G₂
/// ∂_n G = D₁ ln(4 sin²((t − τ)/2)) + D₂
/// ```
///
/// with `G₁, G₂, D₁, D₂` smooth and periodic. The normal derivative is
/// taken at the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SplitKernel {
    pub g1: f64,
    pub g2: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Target point description for [`split_kernel`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Target {
    pub t: f64,
    pub x: [f64; 2],
    pub normal: [f64; 2],
    pub speed: f64,
    pub curvature: f64,
}

pub(crate) fn split_kernel(target: &Target, t_src: f64, source: [f64; 2]) -> SplitKernel {
    let dt = target.t - t_src;
    let log_sin = (4.0 * (0.5 * dt).sin().powi(2)).ln();
    if log_sin.is_finite() && source != target.x {
        let p = Pair::new(source, target.x);
        let n = target.normal;
        let (phi, dphi) = ring_log_coefficient(p.k, p.kp);
        let pre = p.prefactor();
        let g1 = -0.5 * pre * phi;
        let dn_m1 = -p.dn_k2(n);
        let lambda = pre * (n[0] / (2.0 * p.r) * phi + dphi * dn_m1);
        let d1 = -0.5 * lambda;
        let (g, dn) = p.value_and_dn(n);
        SplitKernel {
            g1,
            g2: g - g1 * log_sin,
            d1,
            d2: dn - d1 * log_sin,
        }
    } else {
        split_diagonal(target)
    }
}

/// Limits of the split pieces as the source approaches the target along
/// the curve.
pub(crate) fn split_diagonal(target: &Target) -> SplitKernel {
    let r = target.x[0];
    let nr = target.normal[0];
    let log_term = (8.0 * r / target.speed).ln();
    SplitKernel {
        g1: -r / (4.0 * PI),
        g2: r / (2.0 * PI) * (log_term - 2.0),
        d1: -nr / (8.0 * PI),
        d2: nr / (4.0 * PI) * (log_term - 1.0) - r * target.curvature / (4.0 * PI),
    }
}
