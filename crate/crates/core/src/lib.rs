//! Numerical toolkit for steady axisymmetric bubble rings.
//!
//! The crate is organised bottom-up:
//!
//! * [`specialfn`]: complete elliptic integrals and the ring-kernel profile.
//! * [`geometry`]: cross-section shapes, boundary sampling and every scalar
//!   functional of a cross-section (area, major/minor radius, thickness
//!   measure, total mean curvature, widths, surface sets).
//! * [`streamsolver`]: single-layer Nyström solver for the exterior stream
//!   function and the dynamic boundary-condition residual.
//! * [`certify`]: explicit lower bound on the Weber number of thick rings.
//! * [`suite`]: randomized checks of the geometric inequalities, used by the
//!   `verify-lemmas` command.
//!
//! All solver work happens in normalized units: area `2π` (minor radius
//! `a = 1`) and unit circulation.

// negated comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod geometry;
pub mod specialfn;
pub mod streamsolver;
pub mod suite;

pub use certify::{explicit_bound, BoundCertificate, Verdict};
pub use geometry::{CrossSection, GeometryReport, PhysicalParams, ShapeKind};
pub use streamsolver::{BoundarySolution, ResidualReport};

/// Library version embedded into every report the CLI writes.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
