//! Derivative-free search for shapes that nearly satisfy the dynamic
//! condition.
//!
//! Each candidate is a vector of family parameters followed by `W`. The
//! cross-section is normalized to area `2π`, the exterior problem solved
//! with unit circulation, and `λ ≥ 0` chosen to minimize the L² defect
//! (the minimizer is a clipped weighted mean, so it need not be searched).
//! Candidates outside the admissible region get a penalty score and are
//! never solved.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{normalize_shape, CrossSection};

use super::residual::Fields;
use super::{DirichletSolver, ResidualReport, SolverError};

/// Score of an inadmissible candidate, before adding its distance from the
/// starting point.
pub const PENALTY: f64 = 1e3;
/// Default node count for search solves.
pub const SEARCH_RESOLUTION: usize = 256;

/// Largest centre radius of a normalized disk (radius `√2`) with `δ ≥ 0`.
pub fn thick_disk_limit() -> f64 {
    2.0 * SQRT_2 / 3f64.sqrt()
}

/// Finite-dimensional shape families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ShapeFamily {
    /// Disks of radius `√2` centred at `r = R₀` with `√2 < R₀ ≤ 2√2/√3`.
    ThickDisk,
    /// Ellipses `(r₀, m, n)`, rescaled to area `2π`.
    Ellipse,
    /// Fourier stars with unit base radius and `modes` cosine coefficients;
    /// parameters `(r₀, c₁, …)`, rescaled to area `2π`.
    FourierStar { modes: usize },
}

impl ShapeFamily {
    pub fn parameter_names(&self) -> Vec<String> {
        match self {
            ShapeFamily::ThickDisk => vec!["r0".into()],
            ShapeFamily::Ellipse => vec!["r0".into(), "m".into(), "n".into()],
            ShapeFamily::FourierStar { modes } => std::iter::once("r0".to_string())
                .chain((1..=*modes).map(|k| format!("c{k}")))
                .collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.parameter_names().len()
    }

    /// Starting parameters.
    pub fn initial(&self) -> Vec<f64> {
        match self {
            ShapeFamily::ThickDisk => vec![0.5 * (SQRT_2 + thick_disk_limit())],
            ShapeFamily::Ellipse => vec![2.0, 1.0, 1.0],
            ShapeFamily::FourierStar { modes } => {
                let mut p = vec![0.0; modes + 1];
                p[0] = 2.0;
                p
            }
        }
    }

    /// Normalized cross-section for `params`, or `None` when the parameters
    /// leave the admissible region.
    pub fn shape(&self, params: &[f64], resolution: usize) -> Option<CrossSection> {
        if params.len() != self.dimension() || params.iter().any(|p| !p.is_finite()) {
            return None;
        }
        let raw = match self {
            ShapeFamily::ThickDisk => {
                let r0 = params[0];
                if !(r0 > SQRT_2 && r0 <= thick_disk_limit()) {
                    return None;
                }
                return CrossSection::disk(r0, SQRT_2).ok()?.with_resolution(resolution).ok();
            }
            ShapeFamily::Ellipse => CrossSection::ellipse(params[0], params[1], params[2]).ok()?,
            ShapeFamily::FourierStar { .. } => CrossSection::fourier_star(params[0], 1.0, params[1..].to_vec()).ok()?,
        };
        normalize_shape(&raw).ok()?.shape.with_resolution(resolution).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub family: ShapeFamily,
    pub we: f64,
    pub budget: usize,
    pub seed: u64,
    pub resolution: usize,
}

impl SearchOptions {
    pub fn new(family: ShapeFamily, we: f64, budget: usize, seed: u64) -> SearchOptions {
        SearchOptions {
            family,
            we,
            budget,
            seed,
            resolution: SEARCH_RESOLUTION,
        }
    }
}

/// One row of the evaluation log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub index: usize,
    pub params: Vec<f64>,
    #[serde(rename = "W")]
    pub w: f64,
    pub lambda: f64,
    pub dyn_residual_l2: f64,
    pub dyn_residual_max: f64,
    pub objective: f64,
    pub penalized: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub options: SearchOptions,
    pub best_params: Vec<f64>,
    pub shape: CrossSection,
    #[serde(rename = "W")]
    pub w: f64,
    pub lambda: f64,
    pub report: ResidualReport,
    pub evaluations: Vec<Evaluation>,
}

struct Objective<'a> {
    options: &'a SearchOptions,
    origin: Vec<f64>,
    log: Vec<Evaluation>,
}

impl Objective<'_> {
    fn remaining(&self) -> usize {
        self.options.budget - self.log.len()
    }

    /// Scores `points` concurrently and appends them to the log in order.
    /// Stops at the budget; the returned vector may be shorter than `points`.
    fn batch(&mut self, points: &[Vec<f64>]) -> Vec<f64> {
        let take = points.len().min(self.remaining());
        let start = self.log.len();
        let scored: Vec<Evaluation> = points[..take]
            .par_iter()
            .enumerate()
            .map(|(k, p)| score(self.options, &self.origin, p, start + k))
            .collect();
        let values = scored.iter().map(|e| e.objective).collect();
        self.log.extend(scored);
        values
    }

    fn single(&mut self, point: &[f64]) -> Option<f64> {
        self.batch(&[point.to_vec()]).first().copied()
    }
}

fn split_params(p: &[f64]) -> (&[f64], f64) {
    let (shape, w) = p.split_at(p.len() - 1);
    (shape, w[0])
}

fn evaluate(options: &SearchOptions, params: &[f64]) -> Option<Result<(CrossSection, ResidualReport), SolverError>> {
    let (shape_params, w) = split_params(params);
    if !w.is_finite() {
        return None;
    }
    let shape = options.family.shape(shape_params, options.resolution)?;
    let run = || {
        let sol = DirichletSolver::new(&shape)?.solution(w)?;
        let fields = Fields::new(&shape, &sol)?;
        let lambda = fields.optimal_lambda(options.we);
        Ok((shape.clone(), fields.report(options.we, lambda)))
    };
    Some(run())
}

fn score(options: &SearchOptions, origin: &[f64], params: &[f64], index: usize) -> Evaluation {
    match evaluate(options, params) {
        Some(Ok((_, report))) => Evaluation {
            index,
            params: params.to_vec(),
            w: report.w,
            lambda: report.lambda,
            dyn_residual_l2: report.dyn_residual_l2,
            dyn_residual_max: report.dyn_residual_max,
            objective: report.dyn_residual_l2,
            penalized: false,
        },
        _ => {
            let distance = params
                .iter()
                .zip(origin)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            Evaluation {
                index,
                params: params.to_vec(),
                w: *params.last().unwrap_or(&f64::NAN),
                lambda: f64::NAN,
                dyn_residual_l2: f64::NAN,
                dyn_residual_max: f64::NAN,
                objective: PENALTY + if distance.is_finite() { distance } else { PENALTY },
                penalized: true,
            }
        }
    }
}

/// Nelder–Mead over the family parameters and `W`, with restarts from the
/// incumbent once the simplex collapses. Deterministic for given options.
pub fn residual_minimize(options: &SearchOptions) -> Result<SearchResult, SolverError> {
    if options.budget == 0 {
        return Err(SolverError::InvalidInput("budget must be at least 1".into()));
    }
    if !(options.we > 0.0) || !options.we.is_finite() {
        return Err(SolverError::InvalidInput(format!("We must be positive, got {}", options.we)));
    }
    let mut start = options.family.initial();
    start.push(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut objective = Objective {
        options,
        origin: start.clone(),
        log: Vec::with_capacity(options.budget),
    };

    let mut best = (start.clone(), f64::INFINITY);
    let mut scale = 1.0;
    while objective.remaining() > 0 {
        let simplex = initial_simplex(&best.0, scale, &mut rng);
        let values = objective.batch(&simplex);
        let mut points: Vec<(Vec<f64>, f64)> = simplex.into_iter().zip(values).collect();
        if points.len() == best.0.len() + 1 {
            nelder_mead(&mut objective, &mut points);
        }
        for (p, v) in points {
            if v < best.1 {
                best = (p, v);
            }
        }
        scale *= 0.5;
    }

    let incumbent = objective
        .log
        .iter()
        .filter(|e| !e.penalized)
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .cloned();
    let Some(incumbent) = incumbent else {
        return Err(SolverError::InvalidInput("no admissible candidate was evaluated".into()));
    };
    let (shape, report) = evaluate(options, &incumbent.params).expect("admissible")?;
    Ok(SearchResult {
        options: options.clone(),
        best_params: split_params(&incumbent.params).0.to_vec(),
        shape,
        w: report.w,
        lambda: report.lambda,
        report,
        evaluations: objective.log,
    })
}

fn initial_simplex(x0: &[f64], scale: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut p = x0.to_vec();
        let size = scale * rng.gen_range(0.02..0.08) * x0[i].abs().max(1.0);
        p[i] += if rng.gen_bool(0.5) { size } else { -size };
        simplex.push(p);
    }
    simplex
}

fn nelder_mead(objective: &mut Objective, points: &mut [(Vec<f64>, f64)]) {
    let dim = points.len() - 1;
    loop {
        points.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = points[dim].1 - points[0].1;
        let size = points
            .iter()
            .map(|(p, _)| p.iter().zip(&points[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= 1e-13 * points[0].1.abs().max(1e-300) && size < 1e-9 || size < 1e-13 {
            return;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|k| points[..dim].iter().map(|(p, _)| p[k]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[dim].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = along(1.0);
        let Some(fr) = objective.single(&reflected) else { return };
        if fr < points[0].1 {
            let expanded = along(2.0);
            let Some(fe) = objective.single(&expanded) else {
                points[dim] = (reflected, fr);
                return;
            };
            points[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < points[dim - 1].1 {
            points[dim] = (reflected, fr);
            continue;
        }
        let outside = fr < points[dim].1;
        let contracted = along(if outside { 0.5 } else { -0.5 });
        let Some(fc) = objective.single(&contracted) else { return };
        if fc < fr.min(points[dim].1) {
            points[dim] = (contracted, fc);
            continue;
        }
        let best = points[0].0.clone();
        let shrunk: Vec<Vec<f64>> = points[1..]
            .iter()
            .map(|(p, _)| p.iter().zip(&best).map(|(x, b)| b + 0.5 * (x - b)).collect())
            .collect();
        let values = objective.batch(&shrunk);
        let complete = values.len() == shrunk.len();
        for (k, (p, v)) in shrunk.into_iter().zip(values).enumerate() {
            points[k + 1] = (p, v);
        }
        if !complete {
            return;
        }
    }
}
