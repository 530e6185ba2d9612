//! Exterior stream function of a steady ring and the dynamic boundary
//! condition residual.
//!
//! The flow outside the cross-section `E` has a stream function `ψ` with
//! `−div((1/r) ∇ψ) = 0`, `ψ = W r²/2 + γ` on `∂E`, `ψ = 0` on the axis and
//! `ψ → 0` at infinity. It is represented as a single layer
//! `ψ(x) = ∮ G(y, x) σ(y) ds_y` with the ring kernel `G`, and `γ` is fixed
//! by requiring unit circulation `−∮ (1/r) ∂_n ψ ds = 1`.

mod dirichlet;
pub mod kernel;
mod nystrom;
mod residual;
pub mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::GeometryError;

pub use dirichlet::{solve_dirichlet, DirichletSolver, MAX_SOLVER_RESOLUTION};
pub use kernel::{filament_gradient, filament_stream, ring_kernel, ring_kernel_gradient};
pub use nystrom::SingleLayer;
pub use residual::{dynamic_defect, dynamic_residual, optimal_lambda};
pub use search::{residual_minimize, Evaluation, SearchOptions, SearchResult, ShapeFamily};

/// Target accuracy of a converged solve.
pub const SOLVER_TOLERANCE: f64 = 1e-8;
/// Bordered systems with a larger 1-norm condition estimate are refused.
pub const MAX_CONDITION: f64 = 1e12;
/// Allowed deviation of the computed circulation from 1.
pub const CIRCULATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("the solver needs a smooth boundary; polygons are geometry-only")]
    PolygonNotSupported,
    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,
    #[error("kernel evaluated off the half plane r > 0")]
    OffHalfPlane,
    #[error("boundary system is singular")]
    Singular,
    #[error("boundary system is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },
    #[error("self-refinement did not converge at {resolution} nodes (last change {change:e})")]
    NotConverged { resolution: usize, change: f64 },
    #[error("computed circulation {circulation} differs from 1")]
    CirculationMismatch { circulation: f64 },
    #[error("{0}")]
    InvalidInput(String),
}

/// Boundary values of the exterior solution at the nodes of a smooth
/// cross-section, in normalized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundarySolution {
    pub resolution: usize,
    /// Single-layer density per unit arc length.
    pub density: Vec<f64>,
    pub psi_trace: Vec<f64>,
    /// Exterior normal derivative `∂_n ψ`.
    pub dn_psi: Vec<f64>,
    #[serde(rename = "W")]
    pub w: f64,
    pub gamma: f64,
    /// `−∮ (1/r) ∂_n ψ ds`.
    pub circulation: f64,
    /// `max |ψ − W r²/2 − γ|` over the nodes.
    pub collocation_residual: f64,
    pub condition_estimate: f64,
    /// Change of `γ` against the half-resolution solve, when refined.
    pub refinement_estimate: Option<f64>,
}

/// Defect of the dynamic condition `2H + λ = We q²`,
/// `q = (1/r) ∂_n ψ − W n_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub dyn_residual_l2: f64,
    pub dyn_residual_max: f64,
    /// `|∮ (2H + λ − We q²) ds|`.
    pub identity15_gap: f64,
    /// The gap divided by `∮ |H| ds`.
    pub identity15_gap_relative: f64,
    /// `∮ max(∂_n Ψ, 0) ds`.
    pub max_principle_violation: f64,
    pub lambda: f64,
    pub we: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub perimeter: f64,
}
