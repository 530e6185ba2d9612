//! Randomized checks of the geometric identities and inequalities behind
//! the Weber bound. Every suite reports how many cases it ran, how many
//! violated the tolerance, and the worst margin (negative means violated).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{certify_shape, proof_chain};
use crate::geometry::random::{random_convex_polygon, random_shape, random_smooth_shape};
use crate::geometry::{
    boundary_nodes, corollary_implication_check, geometry_report, polygon_radius_ratio, CrossSection,
    ShapeKind,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub passed: bool,
}

/// Case counts; `full()` matches the acceptance sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteSizes {
    pub ellipses: usize,
    pub smooth: usize,
    pub polygons: usize,
    pub ratio_polygons: usize,
    pub chain: usize,
    pub fat_shapes: usize,
}

impl SuiteSizes {
    pub fn full() -> SuiteSizes {
        SuiteSizes {
            ellipses: 100,
            smooth: 200,
            polygons: 200,
            ratio_polygons: 500,
            chain: 200,
            fat_shapes: 500,
        }
    }

    pub fn scaled(self, factor: f64) -> SuiteSizes {
        let s = |n: usize| ((n as f64 * factor).ceil() as usize).max(1);
        SuiteSizes {
            ellipses: s(self.ellipses),
            smooth: s(self.smooth),
            polygons: s(self.polygons),
            ratio_polygons: s(self.ratio_polygons),
            chain: s(self.chain),
            fat_shapes: s(self.fat_shapes),
        }
    }
}

struct Tally {
    result: SuiteResult,
}

impl Tally {
    fn new(name: &str, tolerance: f64) -> Tally {
        Tally {
            result: SuiteResult {
                name: name.into(),
                cases: 0,
                violations: 0,
                worst_margin: f64::INFINITY,
                tolerance,
                passed: true,
            },
        }
    }

    /// Records `margin`; a case fails when it is below zero.
    fn push(&mut self, margin: f64) {
        let r = &mut self.result;
        r.cases += 1;
        if !(margin >= 0.0) {
            r.violations += 1;
            r.passed = false;
        }
        r.worst_margin = if margin.is_nan() { f64::NAN } else { r.worst_margin.min(margin) };
    }

    fn error(&mut self) {
        self.push(f64::NAN);
    }

    fn finish(self) -> SuiteResult {
        self.result
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random admissible ellipse parameters `(R₀, m, n)` with `R₀ > m`.
pub fn random_ellipse_params<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, f64) {
    let m = rng.gen_range(0.2..3.0);
    let n = rng.gen_range(0.2..3.0);
    let r0 = m * (1.0 + rng.gen_range(0.02..3.0));
    (r0, m, n)
}

fn ellipse_closed_form(seed: u64, count: usize) -> SuiteResult {
    const TOL: f64 = 1e-10;
    let mut rng = rng_for(seed, 1);
    let mut tally = Tally::new("ellipse-inverse-square-closed-form", TOL);
    for _ in 0..count {
        let (r0, m, n) = random_ellipse_params(&mut rng);
        let exact = 2.0 * PI * n / m * (r0 / (r0 * r0 - m * m).sqrt() - 1.0);
        match CrossSection::ellipse(r0, m, n).and_then(|s| geometry_report(&s)) {
            Ok(rep) => tally.push(TOL - (rep.inverse_square_integral - exact).abs() / exact),
            Err(_) => tally.error(),
        }
    }
    tally.finish()
}

fn smooth_identities(seed: u64, count: usize) -> [SuiteResult; 2] {
    const TOL: f64 = 1e-8;
    let mut rng = rng_for(seed, 2);
    let mut mean = Tally::new("total-mean-curvature-plus-delta", TOL);
    let mut gauss = Tally::new("gauss-bonnet-smooth", TOL);
    for _ in 0..count {
        let shape = random_smooth_shape(&mut rng);
        match geometry_report(&shape) {
            Ok(rep) => {
                mean.push(TOL - (rep.total_mean_curvature + rep.delta).abs());
                gauss.push(TOL - (rep.total_curvature - 2.0 * PI).abs());
            }
            Err(_) => {
                mean.error();
                gauss.error();
            }
        }
    }
    [mean.finish(), gauss.finish()]
}

fn polygon_gauss_bonnet(seed: u64, count: usize) -> SuiteResult {
    const TOL: f64 = 1e-12;
    let mut rng = rng_for(seed, 3);
    let mut tally = Tally::new("gauss-bonnet-polygon", TOL);
    for _ in 0..count {
        let shape = random_convex_polygon(&mut rng);
        let total = boundary_nodes(&shape).total_curvature();
        tally.push(TOL - (total - 2.0 * PI).abs());
    }
    tally.finish()
}

fn radius_ratio(seed: u64, count: usize) -> [SuiteResult; 2] {
    const TOL: f64 = 1e-10;
    let mut rng = rng_for(seed, 4);
    let mut bound = Tally::new("radius-ratio-at-most-3", TOL);
    for _ in 0..count {
        let shape = random_convex_polygon(&mut rng);
        let ShapeKind::Polygon { vertices } = shape.kind() else {
            unreachable!()
        };
        match polygon_radius_ratio(vertices) {
            Ok(k) => bound.push(3.0 + TOL - k),
            Err(_) => bound.error(),
        }
    }
    let mut sharp = Tally::new("radius-ratio-sharp-triangle", 1e-12);
    for &(len, half) in &[(1.0, 1.0), (2.5, 0.3), (0.7, 4.0)] {
        let tri: [[f64; 2]; 3] = [[0.0, -half], [len, 0.0], [0.0, half]];
        match polygon_radius_ratio(&tri) {
            Ok(k) => sharp.push(1e-12 - (k - 3.0).abs()),
            Err(_) => sharp.error(),
        }
    }
    [bound.finish(), sharp.finish()]
}

fn chain(seed: u64, count: usize) -> [SuiteResult; 2] {
    let mut rng = rng_for(seed, 5);
    let mut links = Tally::new("proof-chain-inequalities", 0.0);
    let mut measured = Tally::new("measured-bound-dominates-universal", 0.0);
    for _ in 0..count {
        let shape = random_shape(&mut rng);
        match proof_chain(&shape) {
            Ok(m) => links.push(m.worst()),
            Err(_) => links.error(),
        }
        match certify_shape(&shape) {
            Ok(cert) => {
                let m = cert.measured.expect("certify_shape fills the measured bound");
                measured.push(m.we_min - cert.we_min);
            }
            Err(_) => measured.error(),
        }
    }
    [links.finish(), measured.finish()]
}

fn fat_implies_thick(seed: u64, count: usize) -> SuiteResult {
    let mut rng = rng_for(seed, 6);
    let mut tally = Tally::new("fat-implies-thick", 1e-10);
    for _ in 0..count {
        let shape = random_shape(&mut rng);
        match corollary_implication_check(&shape) {
            Ok(true) => tally.push(0.0),
            Ok(false) => tally.push(-1.0),
            Err(_) => tally.error(),
        }
    }
    tally.finish()
}

/// Runs every suite. Deterministic given `seed` and `sizes`.
pub fn run_suites(seed: u64, sizes: SuiteSizes) -> SuiteReport {
    let mut suites = vec![ellipse_closed_form(seed, sizes.ellipses)];
    suites.extend(smooth_identities(seed, sizes.smooth));
    suites.push(polygon_gauss_bonnet(seed, sizes.polygons));
    suites.extend(radius_ratio(seed, sizes.ratio_polygons));
    suites.extend(chain(seed, sizes.chain));
    suites.push(fat_implies_thick(seed, sizes.fat_shapes));
    let passed = suites.iter().all(|s| s.passed);
    SuiteReport { seed, suites, passed }
}
